#pragma once

// Class decisions from a meta-data profile: the six fixed rules, Decision
// Template with the S1 similarity, and the granular combiner. Every
// combiner breaks argmax ties toward the lowest class index.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "granulex/granule.hpp"
#include "granulex/metadata.hpp"

namespace granulex {

struct ClassMembershipVector {
    Eigen::VectorXd values;
    std::string rule;
};

struct Decision {
    ClassMembershipVector membership;
    int label = 0;
};

/// First index of the maximum.
int argmax_lowest(const Eigen::VectorXd& values);

enum class FixedRule { sum, product, max, min, median, majority_vote };

std::string to_string(FixedRule rule);
FixedRule parse_fixed_rule(std::string_view name);
inline constexpr FixedRule kAllFixedRules[] = {FixedRule::sum, FixedRule::product, FixedRule::max,
                                               FixedRule::min, FixedRule::median, FixedRule::majority_vote};

Decision fixed_rule_classify(const MetaProfile& profile, FixedRule rule);

/// Per-class mean profiles.
struct DecisionTemplateModel {
    std::vector<Eigen::MatrixXd> templates;
};

DecisionTemplateModel dt_fit(const MetaMatrix& meta, std::span<const int> labels);

/// S1 = sum(min(A, B)) / sum(max(A, B)); defined as 1 when both are all zero.
double s1_similarity(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

Decision dt_classify(const DecisionTemplateModel& model, const MetaProfile& profile);

enum class HFunction { h1, h2, h3 };

std::string to_string(HFunction h);
HFunction parse_h_function(std::string_view name);

/// Smallest interval length used by h2.
inline constexpr double kH2LengthFloor = 1e-12;

using IntervalMemberships = std::vector<Granule<double>>;

/// One granule per class column.
IntervalMemberships granular_intervals(const MetaProfile& profile, double alpha);

/// Numerical class membership: interval midpoint times h(length).
double ncm(const Granule<double>& interval, HFunction h);

Decision granular_classify(const MetaProfile& profile, double alpha, HFunction h);
Decision granular_classify(const IntervalMemberships& intervals, HFunction h);

}  // namespace granulex
