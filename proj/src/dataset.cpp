#include "granulex/dataset.hpp"

#include <numeric>

#include "granulex/error.hpp"

namespace granulex {

Dataset::Dataset(Eigen::MatrixXd x, std::vector<int> y, ClassCatalog c, std::string n)
    : features(std::move(x)), labels(std::move(y)), catalog(std::move(c)), name(std::move(n)) {
    if (static_cast<Eigen::Index>(labels.size()) != features.rows())
        throw Error("label count does not match feature rows");
    origin.resize(labels.size());
    std::iota(origin.begin(), origin.end(), std::size_t{0});
    for (int label : labels)
        if (label < 0 || label >= catalog.size()) throw Error("label index out of range");
}

std::vector<int> Dataset::class_counts() const {
    std::vector<int> counts(static_cast<std::size_t>(classes()), 0);
    for (int label : labels) ++counts[static_cast<std::size_t>(label)];
    return counts;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.catalog = catalog;
    out.name = name;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.labels.reserve(rows.size());
    out.origin.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
        out.labels.push_back(labels.at(rows[i]));
        out.origin.push_back(origin.at(rows[i]));
    }
    return out;
}

void validate_dataset(const Dataset& data) {
    if (data.size() == 0) throw Error("dataset '" + data.name + "' is empty");
    if (!data.features.allFinite()) throw Error("dataset '" + data.name + "' has non-finite features");
    auto counts = data.class_counts();
    for (int m = 0; m < data.classes(); ++m)
        if (counts[static_cast<std::size_t>(m)] == 0)
            throw Error("dataset '" + data.name + "' has no observation of class '" + data.catalog.name(m) + "'");
}

}  // namespace granulex
