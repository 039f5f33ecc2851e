#include <cmath>

#include "common.hpp"

namespace granulex::learners {

namespace {

// Linear discriminants w_m . x + b_m precomputed from the shared covariance.
class LdaModel final : public Model {
public:
    LdaModel(Eigen::MatrixXd weights, Eigen::VectorXd bias, std::vector<int> present)
        : weights_(std::move(weights)), bias_(std::move(bias)), present_(std::move(present)) {}

    int dims() const override { return static_cast<int>(weights_.cols()); }
    int classes() const override { return static_cast<int>(weights_.rows()); }

    Eigen::VectorXd posterior(const Eigen::VectorXd& x) const override {
        return softmax_present(weights_ * x + bias_, present_);
    }

    json state() const override {
        return {{"weights", matrix_to_json(weights_)}, {"bias", vector_to_json(bias_)}, {"present", present_}};
    }

private:
    Eigen::MatrixXd weights_;
    Eigen::VectorXd bias_;
    std::vector<int> present_;
};

}  // namespace

std::unique_ptr<Model> fit_lda(const LearnerSpec&, const Dataset& data) {
    const int classes = data.classes();
    const auto counts = data.class_counts();
    const auto present = present_classes(data);
    const Eigen::MatrixXd means = class_means(data);

    Eigen::MatrixXd centered = data.features;
    for (int n = 0; n < data.size(); ++n) centered.row(n) -= means.row(data.labels[static_cast<std::size_t>(n)]);
    int groups = 0;
    for (int p : present) groups += p;
    const double dof = std::max(1, data.size() - groups);
    const Eigen::MatrixXd cov = regularized(centered.transpose() * centered / dof);
    const Eigen::LDLT<Eigen::MatrixXd> solver(cov);

    Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(classes, data.dims());
    Eigen::VectorXd bias = Eigen::VectorXd::Zero(classes);
    for (int m = 0; m < classes; ++m) {
        if (!present[static_cast<std::size_t>(m)]) continue;
        const Eigen::VectorXd mu = means.row(m).transpose();
        const Eigen::VectorXd w = solver.solve(mu);
        weights.row(m) = w.transpose();
        bias(m) = -0.5 * mu.dot(w) + std::log(static_cast<double>(counts[static_cast<std::size_t>(m)]) / data.size());
    }
    return std::make_unique<LdaModel>(std::move(weights), std::move(bias), present);
}

std::unique_ptr<Model> restore_lda(const json& state) {
    return std::make_unique<LdaModel>(matrix_from_json(state.at("weights")), vector_from_json(state.at("bias")),
                                      state.at("present").get<std::vector<int>>());
}

}  // namespace granulex::learners
