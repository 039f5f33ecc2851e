#include <algorithm>
#include <numeric>
#include <random>

#include "common.hpp"

namespace granulex::learners {

namespace {

class PerceptronModel final : public Model {
public:
    PerceptronModel(Standardizer scaler, Eigen::MatrixXd weights, Eigen::VectorXd bias, std::vector<int> present)
        : scaler_(std::move(scaler)), weights_(std::move(weights)), bias_(std::move(bias)), present_(std::move(present)) {}

    int dims() const override { return static_cast<int>(weights_.cols()); }
    int classes() const override { return static_cast<int>(weights_.rows()); }

    Eigen::VectorXd posterior(const Eigen::VectorXd& x) const override {
        const Eigen::VectorXd scores = weights_ * scaler_.apply(x) + bias_;
        Eigen::VectorXd p(classes());
        for (int m = 0; m < classes(); ++m) p(m) = sigmoid(scores(m));
        return finalize_posterior(std::move(p), present_);
    }

    json state() const override {
        return {{"scaler", scaler_.to_json()},
                {"weights", matrix_to_json(weights_)},
                {"bias", vector_to_json(bias_)},
                {"present", present_}};
    }

private:
    Standardizer scaler_;
    Eigen::MatrixXd weights_;
    Eigen::VectorXd bias_;
    std::vector<int> present_;
};

}  // namespace

// Multiclass perceptron: on a mistake the true class row moves toward x and
// the predicted row away from it. Visiting order is reshuffled every epoch.
std::unique_ptr<Model> fit_perceptron(const LearnerSpec& spec, const Dataset& data, std::uint64_t seed) {
    const int epochs = static_cast<int>(spec.param("iterations"));
    const double rate = spec.param("rate");
    const auto present = present_classes(data);

    Standardizer scaler = Standardizer::fit(data.features);
    const Eigen::MatrixXd x = scaler.apply(data.features);
    Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(data.classes(), data.dims());
    Eigen::VectorXd bias = Eigen::VectorXd::Zero(data.classes());

    std::mt19937_64 rng(seed);
    std::vector<int> order(static_cast<std::size_t>(data.size()));
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        int mistakes = 0;
        for (int n : order) {
            const Eigen::VectorXd row = x.row(n).transpose();
            const Eigen::VectorXd scores = weights * row + bias;
            int predicted = -1;
            for (int m = 0; m < data.classes(); ++m)
                if (present[static_cast<std::size_t>(m)] && (predicted < 0 || scores(m) > scores(predicted))) predicted = m;
            const int truth = data.labels[static_cast<std::size_t>(n)];
            if (predicted != truth) {
                ++mistakes;
                weights.row(truth) += rate * row.transpose();
                bias(truth) += rate;
                weights.row(predicted) -= rate * row.transpose();
                bias(predicted) -= rate;
            }
        }
        if (mistakes == 0) break;
    }
    return std::make_unique<PerceptronModel>(std::move(scaler), std::move(weights), std::move(bias), present);
}

std::unique_ptr<Model> restore_perceptron(const json& state) {
    return std::make_unique<PerceptronModel>(Standardizer::from_json(state.at("scaler")),
                                             matrix_from_json(state.at("weights")), vector_from_json(state.at("bias")),
                                             state.at("present").get<std::vector<int>>());
}

}  // namespace granulex::learners
