#include <algorithm>
#include <numeric>

#include "common.hpp"

namespace granulex::learners {

namespace {

struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Eigen::VectorXd proportions;
};

double gini(const Eigen::VectorXd& counts, double total) {
    if (total <= 0.0) return 0.0;
    return 1.0 - (counts / total).squaredNorm();
}

// CART with Gini impurity. Samples with x[feature] <= threshold go left.
class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, int max_depth, int min_leaf)
        : data_(data), max_depth_(max_depth), min_leaf_(min_leaf) {}

    std::vector<Node> build() {
        std::vector<int> all(static_cast<std::size_t>(data_.size()));
        std::iota(all.begin(), all.end(), 0);
        grow(all, 0);
        return std::move(nodes_);
    }

private:
    Eigen::VectorXd counts_of(const std::vector<int>& rows) const {
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(data_.classes());
        for (int r : rows) counts(data_.labels[static_cast<std::size_t>(r)]) += 1.0;
        return counts;
    }

    int grow(const std::vector<int>& rows, int depth) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        const Eigen::VectorXd counts = counts_of(rows);
        const double n = static_cast<double>(rows.size());
        nodes_[static_cast<std::size_t>(id)].proportions = counts / n;

        const double parent = gini(counts, n);
        if (depth >= max_depth_ || parent == 0.0 || static_cast<int>(rows.size()) < 2 * min_leaf_) return id;

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_gain = 1e-12;
        std::vector<int> order = rows;
        for (int f = 0; f < data_.dims(); ++f) {
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const double va = data_.features(a, f), vb = data_.features(b, f);
                return va < vb || (va == vb && a < b);
            });
            Eigen::VectorXd left = Eigen::VectorXd::Zero(data_.classes());
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                left(data_.labels[static_cast<std::size_t>(order[i])]) += 1.0;
                const double v = data_.features(order[i], f);
                const double next = data_.features(order[i + 1], f);
                const auto n_left = static_cast<int>(i + 1);
                const auto n_right = static_cast<int>(order.size()) - n_left;
                if (v == next || n_left < min_leaf_ || n_right < min_leaf_) continue;
                const double impurity =
                    (n_left * gini(left, n_left) + n_right * gini(counts - left, n_right)) / n;
                const double gain = parent - impurity;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (v + next);
                }
            }
        }
        if (best_feature < 0) return id;

        std::vector<int> left_rows, right_rows;
        for (int r : rows)
            (data_.features(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
        const int left = grow(left_rows, depth + 1);
        const int right = grow(right_rows, depth + 1);
        auto& node = nodes_[static_cast<std::size_t>(id)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = left;
        node.right = right;
        return id;
    }

    const Dataset& data_;
    int max_depth_;
    int min_leaf_;
    std::vector<Node> nodes_;
};

class TreeModel final : public Model {
public:
    TreeModel(std::vector<Node> nodes, int dims, int classes)
        : nodes_(std::move(nodes)), dims_(dims), classes_(classes) {}

    int dims() const override { return dims_; }
    int classes() const override { return classes_; }

    Eigen::VectorXd posterior(const Eigen::VectorXd& x) const override {
        const Node* node = &nodes_.front();
        while (node->feature >= 0)
            node = &nodes_[static_cast<std::size_t>(x(node->feature) <= node->threshold ? node->left : node->right)];
        return node->proportions;
    }

    json state() const override {
        json nodes = json::array();
        for (const auto& n : nodes_)
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"proportions", vector_to_json(n.proportions)}});
        return {{"dims", dims_}, {"classes", classes_}, {"nodes", std::move(nodes)}};
    }

private:
    std::vector<Node> nodes_;
    int dims_;
    int classes_;
};

}  // namespace

std::unique_ptr<Model> fit_tree(const LearnerSpec& spec, const Dataset& data) {
    TreeBuilder builder(data, static_cast<int>(spec.param("max_depth")), static_cast<int>(spec.param("min_leaf")));
    return std::make_unique<TreeModel>(builder.build(), data.dims(), data.classes());
}

std::unique_ptr<Model> restore_tree(const json& state) {
    std::vector<Node> nodes;
    for (const auto& n : state.at("nodes")) {
        Node node;
        node.feature = n.at("feature").get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<int>();
        node.right = n.at("right").get<int>();
        node.proportions = vector_from_json(n.at("proportions"));
        nodes.push_back(std::move(node));
    }
    return std::make_unique<TreeModel>(std::move(nodes), state.at("dims").get<int>(), state.at("classes").get<int>());
}

}  // namespace granulex::learners
