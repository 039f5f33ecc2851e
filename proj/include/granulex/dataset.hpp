#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "granulex/metadata.hpp"

namespace granulex {

/// Labelled observations. `origin` records each row's index in the dataset
/// it was cut from, so subsets can be traced back to the full data.
struct Dataset {
    Eigen::MatrixXd features;
    std::vector<int> labels;
    ClassCatalog catalog;
    std::string name;
    std::vector<std::size_t> origin;

    Dataset() = default;
    Dataset(Eigen::MatrixXd x, std::vector<int> y, ClassCatalog c, std::string n = {});

    int size() const { return static_cast<int>(features.rows()); }
    int dims() const { return static_cast<int>(features.cols()); }
    int classes() const { return catalog.size(); }

    std::vector<int> class_counts() const;
    Dataset subset(std::span<const std::size_t> rows) const;
};

/// Enforces the ingestion invariants: finite features, labels in range,
/// every class observed at least once.
void validate_dataset(const Dataset& data);

}  // namespace granulex
