#include <cmath>
#include <limits>

#include "common.hpp"

namespace granulex::learners {

namespace {

class LogisticModel final : public Model {
public:
    LogisticModel(Standardizer scaler, Eigen::MatrixXd weights, Eigen::VectorXd bias, std::vector<int> present)
        : scaler_(std::move(scaler)), weights_(std::move(weights)), bias_(std::move(bias)), present_(std::move(present)) {}

    int dims() const override { return static_cast<int>(weights_.cols()); }
    int classes() const override { return static_cast<int>(weights_.rows()); }

    Eigen::VectorXd posterior(const Eigen::VectorXd& x) const override {
        return softmax_present(weights_ * scaler_.apply(x) + bias_, present_);
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

// Full-batch gradient ascent on the mean multinomial log-likelihood over
// standardized features, starting from zero weights.
std::unique_ptr<Model> fit_logistic(const LearnerSpec& spec, const Dataset& data) {
    const int iterations = static_cast<int>(spec.param("iterations"));
    const double rate = spec.param("rate");
    const int classes = data.classes();
    const auto present = present_classes(data);

    Standardizer scaler = Standardizer::fit(data.features);
    const Eigen::MatrixXd x = scaler.apply(data.features);
    Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(data.size(), classes);
    for (int n = 0; n < data.size(); ++n) targets(n, data.labels[static_cast<std::size_t>(n)]) = 1.0;

    Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(classes, data.dims());
    Eigen::VectorXd bias = Eigen::VectorXd::Zero(classes);
    Eigen::MatrixXd probs(data.size(), classes);
    for (int it = 0; it < iterations; ++it) {
        Eigen::MatrixXd logits = x * weights.transpose();
        logits.rowwise() += bias.transpose();
        for (int m = 0; m < classes; ++m)
            if (!present[static_cast<std::size_t>(m)]) logits.col(m).setConstant(-std::numeric_limits<double>::infinity());
        const Eigen::VectorXd top = logits.rowwise().maxCoeff();
        probs = (logits.colwise() - top).array().exp().matrix();
        probs.array().colwise() /= probs.rowwise().sum().array();
        const Eigen::MatrixXd residual = targets - probs;
        weights += rate * (residual.transpose() * x) / data.size();
        bias += rate * residual.colwise().sum().transpose() / data.size();
    }
    return std::make_unique<LogisticModel>(std::move(scaler), std::move(weights), std::move(bias), present);
}

std::unique_ptr<Model> restore_logistic(const json& state) {
    return std::make_unique<LogisticModel>(Standardizer::from_json(state.at("scaler")), matrix_from_json(state.at("weights")),
                                           vector_from_json(state.at("bias")),
                                           state.at("present").get<std::vector<int>>());
}

}  // namespace granulex::learners
