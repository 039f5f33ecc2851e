#pragma once

// Shared helpers for the bundled learners. Internal header.

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "granulex/dataset.hpp"
#include "granulex/learners.hpp"

namespace granulex::learners {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j);
json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);

/// 1 for classes observed in `data`, 0 otherwise.
std::vector<int> present_classes(const Dataset& data);

/// Zeroes absent classes, clamps negatives and renormalizes; falls back to
/// uniform over present classes when nothing is left.
Eigen::VectorXd finalize_posterior(Eigen::VectorXd p, const std::vector<int>& present);

/// Softmax over present classes of the given log-scores.
Eigen::VectorXd softmax_present(const Eigen::VectorXd& logits, const std::vector<int>& present);

double sigmoid(double z);

/// Per-feature affine standardization fitted on training data. Constant
/// features keep unit scale.
struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    static Standardizer fit(const Eigen::MatrixXd& x);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    json to_json() const;
    static Standardizer from_json(const json& j);
};

/// Class means (M x d); rows of absent classes are zero.
Eigen::MatrixXd class_means(const Dataset& data);

/// Adds ridge * trace / d to the diagonal (1e-6 when the trace vanishes).
Eigen::MatrixXd regularized(Eigen::MatrixXd scatter, double ridge = 1e-6);

std::unique_ptr<Model> fit_knn(const LearnerSpec& spec, const Dataset& data);
std::unique_ptr<Model> fit_naive_bayes(const LearnerSpec& spec, const Dataset& data);
std::unique_ptr<Model> fit_lda(const LearnerSpec& spec, const Dataset& data);
std::unique_ptr<Model> fit_fisher(const LearnerSpec& spec, const Dataset& data);
std::unique_ptr<Model> fit_logistic(const LearnerSpec& spec, const Dataset& data);
std::unique_ptr<Model> fit_tree(const LearnerSpec& spec, const Dataset& data);
std::unique_ptr<Model> fit_nearest_mean(const LearnerSpec& spec, const Dataset& data);
std::unique_ptr<Model> fit_perceptron(const LearnerSpec& spec, const Dataset& data, std::uint64_t seed);

std::unique_ptr<Model> restore_knn(const json& state);
std::unique_ptr<Model> restore_naive_bayes(const json& state);
std::unique_ptr<Model> restore_lda(const json& state);
std::unique_ptr<Model> restore_fisher(const json& state);
std::unique_ptr<Model> restore_logistic(const json& state);
std::unique_ptr<Model> restore_tree(const json& state);
std::unique_ptr<Model> restore_nearest_mean(const json& state);
std::unique_ptr<Model> restore_perceptron(const json& state);

}  // namespace granulex::learners
