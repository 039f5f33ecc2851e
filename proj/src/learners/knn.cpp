#include <algorithm>
#include <numeric>

#include "common.hpp"

namespace granulex::learners {

namespace {

class KnnModel final : public Model {
public:
    KnnModel(Eigen::MatrixXd x, std::vector<int> y, int classes, int k)
        : x_(std::move(x)), y_(std::move(y)), classes_(classes), k_(k) {}

    int dims() const override { return static_cast<int>(x_.cols()); }
    int classes() const override { return classes_; }

    Eigen::VectorXd posterior(const Eigen::VectorXd& query) const override {
        const Eigen::VectorXd dist = (x_.rowwise() - query.transpose()).rowwise().squaredNorm();
        std::vector<int> order(y_.size());
        std::iota(order.begin(), order.end(), 0);
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(k_), order.size());
        // Equal distances keep observation order.
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                          [&](int a, int b) { return dist(a) < dist(b) || (dist(a) == dist(b) && a < b); });

        // An exact match takes the whole vote.
        const bool exact = dist(order.front()) == 0.0;
        Eigen::VectorXd votes = Eigen::VectorXd::Zero(classes_);
        for (std::size_t i = 0; i < k; ++i) {
            if (exact && dist(order[i]) != 0.0) break;
            votes(y_[static_cast<std::size_t>(order[i])]) += 1.0;
        }
        return votes / votes.sum();
    }

    json state() const override {
        return {{"k", k_}, {"classes", classes_}, {"features", matrix_to_json(x_)}, {"labels", y_}};
    }

private:
    Eigen::MatrixXd x_;
    std::vector<int> y_;
    int classes_;
    int k_;
};

}  // namespace

std::unique_ptr<Model> fit_knn(const LearnerSpec& spec, const Dataset& data) {
    return std::make_unique<KnnModel>(data.features, data.labels, data.classes(), static_cast<int>(spec.param("k")));
}

std::unique_ptr<Model> restore_knn(const json& state) {
    return std::make_unique<KnnModel>(matrix_from_json(state.at("features")), state.at("labels").get<std::vector<int>>(),
                                      state.at("classes").get<int>(), state.at("k").get<int>());
}

}  // namespace granulex::learners
