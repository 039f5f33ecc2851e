#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "granulex/error.hpp"

namespace granulex::learners {

json matrix_to_json(const Eigen::MatrixXd& m) {
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw Error("matrix size mismatch in model state");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)].get<double>();
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
    auto values = j.get<std::vector<double>>();
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::vector<int> present_classes(const Dataset& data) {
    std::vector<int> present(static_cast<std::size_t>(data.classes()), 0);
    for (int label : data.labels) present[static_cast<std::size_t>(label)] = 1;
    return present;
}

Eigen::VectorXd finalize_posterior(Eigen::VectorXd p, const std::vector<int>& present) {
    for (Eigen::Index m = 0; m < p.size(); ++m) {
        if (!present[static_cast<std::size_t>(m)] || !std::isfinite(p(m)) || p(m) < 0.0) p(m) = 0.0;
    }
    const double total = p.sum();
    if (total > 0.0 && std::isfinite(total)) return p / total;
    int count = 0;
    for (int flag : present) count += flag;
    for (Eigen::Index m = 0; m < p.size(); ++m) p(m) = present[static_cast<std::size_t>(m)] ? 1.0 / count : 0.0;
    return p;
}

Eigen::VectorXd softmax_present(const Eigen::VectorXd& logits, const std::vector<int>& present) {
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index m = 0; m < logits.size(); ++m)
        if (present[static_cast<std::size_t>(m)]) top = std::max(top, logits(m));
    Eigen::VectorXd p = Eigen::VectorXd::Zero(logits.size());
    for (Eigen::Index m = 0; m < logits.size(); ++m)
        if (present[static_cast<std::size_t>(m)]) p(m) = std::exp(logits(m) - top);
    return finalize_posterior(std::move(p), present);
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
    Standardizer s;
    s.mean = x.colwise().mean();
    s.scale.resize(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double var = (x.col(c).array() - s.mean(c)).square().mean();
        s.scale(c) = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
    return (x.rowwise() - mean).array().rowwise() / scale.array();
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& x) const {
    return (x - mean.transpose()).array() / scale.transpose().array();
}

json Standardizer::to_json() const {
    return {{"mean", vector_to_json(mean.transpose())}, {"scale", vector_to_json(scale.transpose())}};
}

Standardizer Standardizer::from_json(const json& j) {
    Standardizer s;
    s.mean = vector_from_json(j.at("mean")).transpose();
    s.scale = vector_from_json(j.at("scale")).transpose();
    return s;
}

Eigen::MatrixXd class_means(const Dataset& data) {
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(data.classes(), data.dims());
    auto counts = data.class_counts();
    for (int n = 0; n < data.size(); ++n) means.row(data.labels[static_cast<std::size_t>(n)]) += data.features.row(n);
    for (int m = 0; m < data.classes(); ++m)
        if (counts[static_cast<std::size_t>(m)] > 0) means.row(m) /= counts[static_cast<std::size_t>(m)];
    return means;
}

Eigen::MatrixXd regularized(Eigen::MatrixXd scatter, double ridge) {
    const double d = static_cast<double>(scatter.rows());
    const double trace = scatter.trace();
    const double lambda = trace > 0.0 ? ridge * trace / d : ridge;
    scatter.diagonal().array() += lambda;
    return scatter;
}

}  // namespace granulex::learners
