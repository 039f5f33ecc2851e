#pragma once

// Training of the granular combiner:
//   1. meta-data for the training set by stratified T-fold cross-validation,
//   2. err(alpha) for every grid value, alpha = argmin (smallest on ties),
//   3. refit of every base learner on the full training set.
//
// err(alpha) is measured on the same meta-data used to choose alpha, so the
// reported curve is an optimistic estimate of test error.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "granulex/combiners.hpp"
#include "granulex/dataset.hpp"
#include "granulex/learners.hpp"
#include "granulex/metadata.hpp"

namespace granulex {

/// Strictly increasing, non-negative candidate alphas.
class AlphaGrid {
public:
    explicit AlphaGrid(std::vector<double> values);

    /// {0, 0.1, ..., 4}: 41 values.
    static AlphaGrid standard();
    /// "lo:step:hi", inclusive of hi when it lies on the lattice.
    static AlphaGrid parse(std::string_view text);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
};

struct FoldPlan {
    std::vector<int> assignments;
    int folds = 0;
    std::uint64_t seed = 0;

    std::vector<std::size_t> train_rows(int fold) const;
    std::vector<std::size_t> test_rows(int fold) const;
};

/// Stratified plan: classes are shuffled independently and dealt round-robin,
/// so per-class and overall fold sizes each differ by at most one.
FoldPlan make_fold_plan(std::span<const int> labels, int classes, int folds, std::uint64_t seed);

/// Row n of the result comes from classifiers fitted without observation n.
MetaMatrix generate_meta_cv(const Dataset& data, const std::vector<std::shared_ptr<const Learner>>& learners,
                            const FoldPlan& plan, std::uint64_t seed);
MetaMatrix generate_meta_cv(const Dataset& data, const std::vector<LearnerSpec>& specs, const FoldPlan& plan,
                            std::uint64_t seed);

double error_for_alpha(const MetaMatrix& meta, std::span<const int> labels, double alpha, HFunction h);

struct AlphaSelection {
    double alpha = 0.0;
    std::vector<std::pair<double, double>> curve;  // (alpha, error)
};

AlphaSelection select_alpha(const MetaMatrix& meta, std::span<const int> labels, const AlphaGrid& grid, HFunction h);

/// Steps 1 and 2 of training: stratified `folds`-fold meta-data, then the
/// grid search. train() uses the same seeds, so its curve matches this one.
AlphaSelection cross_validated_alpha(const Dataset& data, const std::vector<std::shared_ptr<const Learner>>& learners,
                                     const AlphaGrid& grid, HFunction h, int folds, std::uint64_t seed);

struct TrainOptions {
    /// A grid triggers the cross-validated search; a number fixes alpha and
    /// skips meta-data generation entirely.
    std::variant<AlphaGrid, double> alpha = AlphaGrid::standard();
    HFunction h = HFunction::h3;
    int folds = 10;
    std::uint64_t seed = 0;
};

struct TrainedEnsemble {
    std::vector<FittedClassifier> classifiers;
    double alpha = 1.0;
    HFunction h = HFunction::h3;
    ClassCatalog catalog;
    std::vector<std::pair<double, double>> alpha_error_curve;

    int dims() const;
};

TrainedEnsemble train(const Dataset& data, const std::vector<std::shared_ptr<const Learner>>& learners,
                      const TrainOptions& options);
TrainedEnsemble train(const Dataset& data, const std::vector<LearnerSpec>& specs, const TrainOptions& options);

/// Meta-data profile of one observation from already fitted classifiers.
MetaProfile profile_of(const std::vector<FittedClassifier>& classifiers, const Eigen::VectorXd& x);

struct Prediction {
    MetaProfile profile;
    IntervalMemberships intervals;
    ClassMembershipVector membership;
    int label = 0;
};

Prediction predict(const TrainedEnsemble& ensemble, const Eigen::VectorXd& x);
std::vector<Prediction> predict(const TrainedEnsemble& ensemble, const Eigen::MatrixXd& x);

inline constexpr int kEnsembleFormatVersion = 1;

nlohmann::json to_json(const TrainedEnsemble& ensemble);
TrainedEnsemble ensemble_from_json(const nlohmann::json& j);

}  // namespace granulex
