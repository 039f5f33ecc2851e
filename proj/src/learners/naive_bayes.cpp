#include <cmath>
#include <numbers>

#include "common.hpp"

namespace granulex::learners {

namespace {

constexpr double kVarianceFloor = 1e-9;

class NaiveBayesModel final : public Model {
public:
    NaiveBayesModel(Eigen::MatrixXd means, Eigen::MatrixXd variances, Eigen::VectorXd log_priors, std::vector<int> present)
        : means_(std::move(means)), vars_(std::move(variances)), log_priors_(std::move(log_priors)),
          present_(std::move(present)) {}

    int dims() const override { return static_cast<int>(means_.cols()); }
    int classes() const override { return static_cast<int>(means_.rows()); }

    Eigen::VectorXd posterior(const Eigen::VectorXd& x) const override {
        Eigen::VectorXd logits(classes());
        for (int m = 0; m < classes(); ++m) {
            const auto diff = x.transpose().array() - means_.row(m).array();
            logits(m) = log_priors_(m) -
                        0.5 * ((diff.square() / vars_.row(m).array()) + (2.0 * std::numbers::pi * vars_.row(m).array()).log()).sum();
        }
        return softmax_present(logits, present_);
    }

    json state() const override {
        return {{"means", matrix_to_json(means_)},
                {"variances", matrix_to_json(vars_)},
                {"log_priors", vector_to_json(log_priors_)},
                {"present", present_}};
    }

private:
    Eigen::MatrixXd means_;
    Eigen::MatrixXd vars_;
    Eigen::VectorXd log_priors_;
    std::vector<int> present_;
};

}  // namespace

std::unique_ptr<Model> fit_naive_bayes(const LearnerSpec&, const Dataset& data) {
    const int classes = data.classes();
    const auto counts = data.class_counts();
    Eigen::MatrixXd means = class_means(data);
    Eigen::MatrixXd vars = Eigen::MatrixXd::Zero(classes, data.dims());
    for (int n = 0; n < data.size(); ++n) {
        const int m = data.labels[static_cast<std::size_t>(n)];
        vars.row(m).array() += (data.features.row(n) - means.row(m)).array().square();
    }
    Eigen::VectorXd log_priors(classes);
    for (int m = 0; m < classes; ++m) {
        const int c = counts[static_cast<std::size_t>(m)];
        if (c > 0) vars.row(m) /= c;
        log_priors(m) = std::log((c + 1.0) / (data.size() + classes));
    }
    vars = vars.array().max(kVarianceFloor);
    return std::make_unique<NaiveBayesModel>(std::move(means), std::move(vars), std::move(log_priors),
                                             present_classes(data));
}

std::unique_ptr<Model> restore_naive_bayes(const json& state) {
    return std::make_unique<NaiveBayesModel>(matrix_from_json(state.at("means")), matrix_from_json(state.at("variances")),
                                             vector_from_json(state.at("log_priors")),
                                             state.at("present").get<std::vector<int>>());
}

}  // namespace granulex::learners
