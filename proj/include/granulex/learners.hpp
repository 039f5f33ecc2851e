#pragma once

// Base learners emitting soft labels.
//
// Posterior recipes:
//   knn                  vote fractions among the k nearest training points
//   gaussian-naive-bayes normalized class likelihoods (add-one priors, variance floor)
//   lda                  softmax of the linear discriminants (shared covariance)
//   fisher               logistic squashing of the Fisher discriminant score
//   logistic-linear      multinomial logistic output
//   decision-tree        class proportions of the reached leaf
//   decision-stump       a depth-one decision tree
//   nearest-mean         softmin of the Euclidean distances to the class means
//   perceptron           logistic squashing of the perceptron scores
//
// Classes absent from the training data always receive probability 0.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "granulex/dataset.hpp"

namespace granulex {

enum class LearnerKind {
    knn,
    gaussian_naive_bayes,
    lda,
    fisher,
    logistic_linear,
    decision_tree,
    decision_stump,
    nearest_mean,
    perceptron,
};

std::string to_string(LearnerKind kind);
LearnerKind parse_learner_kind(std::string_view name);

/// Learner kind plus its hyperparameters. Missing hyperparameters take the
/// kind's defaults when the spec is normalized.
struct LearnerSpec {
    LearnerKind kind = LearnerKind::knn;
    std::map<std::string, double> params;

    /// Stable identifier such as "knn5" or "decision-tree".
    std::string id() const;
    double param(const std::string& key) const { return params.at(key); }

    friend bool operator==(const LearnerSpec&, const LearnerSpec&) = default;
};

/// Fills defaults and rejects unknown or out-of-range hyperparameters.
LearnerSpec normalized(LearnerSpec spec);

/// Parses "kind" or "kind:key=value:key=value", e.g. "knn:k=25".
LearnerSpec parse_learner_spec(std::string_view text);
std::string format_learner_spec(const LearnerSpec& spec);

/// LDA, naive Bayes, KNN5/25/50, tree, stump, Fisher, logistic, nearest mean.
std::vector<LearnerSpec> default_roster();
/// default_roster() plus perceptron and KNN75.
std::vector<LearnerSpec> extended_roster();

/// Fitted model state for one learner.
class Model {
public:
    virtual ~Model() = default;
    virtual int dims() const = 0;
    virtual int classes() const = 0;
    /// Unvalidated posterior; FittedClassifier checks inputs and outputs.
    virtual Eigen::VectorXd posterior(const Eigen::VectorXd& x) const = 0;
    virtual nlohmann::json state() const = 0;
};

/// A learning algorithm. Implementations other than the bundled kinds (for
/// example instrumented test learners) can be plugged into training.
class Learner {
public:
    virtual ~Learner() = default;
    virtual std::string id() const = 0;
    virtual std::unique_ptr<Model> fit(const Dataset& data, std::uint64_t seed) const = 0;
    /// Set for bundled kinds; required for serialization.
    virtual std::optional<LearnerSpec> spec() const { return std::nullopt; }
};

std::shared_ptr<const Learner> make_learner(const LearnerSpec& spec);
std::vector<std::shared_ptr<const Learner>> make_learners(const std::vector<LearnerSpec>& specs);

class FittedClassifier {
public:
    FittedClassifier() = default;
    FittedClassifier(std::string id, std::optional<LearnerSpec> spec, std::shared_ptr<const Model> model,
                     ClassCatalog catalog);

    const std::string& id() const { return id_; }
    const std::optional<LearnerSpec>& spec() const { return spec_; }
    const ClassCatalog& catalog() const { return catalog_; }
    const Model& model() const { return *model_; }

    /// Soft label for one observation: entries in [0,1] summing to 1.
    Eigen::VectorXd predict_proba(const Eigen::VectorXd& x) const;
    /// One soft label per row of `x`.
    Eigen::MatrixXd predict_proba_batch(const Eigen::MatrixXd& x) const;

private:
    std::string id_;
    std::optional<LearnerSpec> spec_;
    std::shared_ptr<const Model> model_;
    ClassCatalog catalog_;
};

FittedClassifier fit(const Learner& learner, const Dataset& data, std::uint64_t seed);
FittedClassifier fit(const LearnerSpec& spec, const Dataset& data, std::uint64_t seed);

nlohmann::json to_json(const FittedClassifier& classifier);
FittedClassifier classifier_from_json(const nlohmann::json& j, const ClassCatalog& catalog);

/// Rebuilds a bundled model from its serialized state.
std::unique_ptr<Model> restore_model(const LearnerSpec& spec, const nlohmann::json& state);

}  // namespace granulex
