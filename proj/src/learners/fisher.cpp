#include <cmath>

#include "common.hpp"

namespace granulex::learners {

namespace {

// One-vs-rest Fisher discriminants. Each score is centred on the midpoint of
// the projected group means and scaled by the pooled projected deviation
// before squashing; for two classes the two discriminants mirror each other.
class FisherModel final : public Model {
public:
    FisherModel(Eigen::MatrixXd weights, Eigen::VectorXd offsets, Eigen::VectorXd scales, std::vector<int> present)
        : weights_(std::move(weights)), offsets_(std::move(offsets)), scales_(std::move(scales)),
          present_(std::move(present)) {}

    int dims() const override { return static_cast<int>(weights_.cols()); }
    int classes() const override { return static_cast<int>(weights_.rows()); }

    Eigen::VectorXd posterior(const Eigen::VectorXd& x) const override {
        const Eigen::VectorXd scores = ((weights_ * x - offsets_).array() / scales_.array()).matrix();
        Eigen::VectorXd p(classes());
        for (int m = 0; m < classes(); ++m) p(m) = sigmoid(scores(m));
        return finalize_posterior(std::move(p), present_);
    }

    json state() const override {
        return {{"weights", matrix_to_json(weights_)},
                {"offsets", vector_to_json(offsets_)},
                {"scales", vector_to_json(scales_)},
                {"present", present_}};
    }

private:
    Eigen::MatrixXd weights_;
    Eigen::VectorXd offsets_;
    Eigen::VectorXd scales_;
    std::vector<int> present_;
};

}  // namespace

std::unique_ptr<Model> fit_fisher(const LearnerSpec&, const Dataset& data) {
    const int classes = data.classes();
    const int d = data.dims();
    const auto present = present_classes(data);

    Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(classes, d);
    Eigen::VectorXd offsets = Eigen::VectorXd::Zero(classes);
    Eigen::VectorXd scales = Eigen::VectorXd::Ones(classes);

    for (int m = 0; m < classes; ++m) {
        if (!present[static_cast<std::size_t>(m)]) continue;
        Eigen::RowVectorXd mean_in = Eigen::RowVectorXd::Zero(d);
        Eigen::RowVectorXd mean_out = Eigen::RowVectorXd::Zero(d);
        int n_in = 0;
        for (int n = 0; n < data.size(); ++n) {
            if (data.labels[static_cast<std::size_t>(n)] == m) {
                mean_in += data.features.row(n);
                ++n_in;
            } else {
                mean_out += data.features.row(n);
            }
        }
        const int n_out = data.size() - n_in;
        if (n_out == 0) continue;  // only one class present; posterior collapses onto it
        mean_in /= n_in;
        mean_out /= n_out;

        Eigen::MatrixXd centered = data.features;
        for (int n = 0; n < data.size(); ++n)
            centered.row(n) -= data.labels[static_cast<std::size_t>(n)] == m ? mean_in : mean_out;
        const Eigen::MatrixXd scatter = regularized(centered.transpose() * centered);
        const Eigen::VectorXd w = scatter.ldlt().solve((mean_in - mean_out).transpose());

        const double dof = std::max(1, data.size() - 2);
        const double spread = std::sqrt(std::max((centered * w).squaredNorm() / dof, 1e-300));
        weights.row(m) = w.transpose();
        offsets(m) = 0.5 * (mean_in + mean_out).dot(w.transpose());
        scales(m) = spread;
    }
    return std::make_unique<FisherModel>(std::move(weights), std::move(offsets), std::move(scales), present);
}

std::unique_ptr<Model> restore_fisher(const json& state) {
    return std::make_unique<FisherModel>(matrix_from_json(state.at("weights")), vector_from_json(state.at("offsets")),
                                         vector_from_json(state.at("scales")),
                                         state.at("present").get<std::vector<int>>());
}

}  // namespace granulex::learners
