#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace granulex {

/// Ordered, distinct class names y_1 ... y_M with M >= 2.
class ClassCatalog {
public:
    ClassCatalog() = default;
    explicit ClassCatalog(std::vector<std::string> labels);

    int size() const { return static_cast<int>(labels_.size()); }
    const std::string& name(int index) const { return labels_.at(static_cast<std::size_t>(index)); }
    const std::vector<std::string>& labels() const { return labels_; }
    std::optional<int> index_of(const std::string& name) const;

    friend bool operator==(const ClassCatalog&, const ClassCatalog&) = default;

private:
    std::vector<std::string> labels_;
};

inline constexpr double kRowTolerance = 1e-9;

/// Posterior matrix of one observation: row k holds classifier k's
/// soft label over the M classes.
struct MetaProfile {
    Eigen::MatrixXd scores;
    std::vector<std::string> classifier_ids;

    MetaProfile() = default;
    explicit MetaProfile(Eigen::MatrixXd s, std::vector<std::string> ids = {});

    int classifiers() const { return static_cast<int>(scores.rows()); }
    int classes() const { return static_cast<int>(scores.cols()); }
};

/// The K posteriors for class `class_index`, in classifier order.
std::vector<double> column_sample(const MetaProfile& profile, int class_index);

struct RowViolation {
    int row;
    double sum;
    std::string reason;
};

/// Checks every row against the soft-label constraints. Rows that drift by
/// at most kRowTolerance are clamped to [0,1] and renormalized in place;
/// rows beyond it are reported and left untouched.
std::vector<RowViolation> validate(MetaProfile& profile);

/// Throws Error when `validate` reports any violation.
void require_valid(MetaProfile& profile);

/// Meta-data of a whole set of observations, one profile per row.
class MetaMatrix {
public:
    MetaMatrix() = default;
    MetaMatrix(std::vector<MetaProfile> rows, ClassCatalog catalog);

    int size() const { return static_cast<int>(rows_.size()); }
    int classifiers() const { return rows_.empty() ? 0 : rows_.front().classifiers(); }
    int classes() const { return catalog_.size(); }
    const MetaProfile& operator[](int n) const { return rows_.at(static_cast<std::size_t>(n)); }
    const std::vector<MetaProfile>& rows() const { return rows_; }
    const ClassCatalog& catalog() const { return catalog_; }

    /// N x MK matrix, classifier-major: P_1(y_1) ... P_1(y_M) ... P_K(y_M).
    Eigen::MatrixXd flatten() const;

private:
    std::vector<MetaProfile> rows_;
    ClassCatalog catalog_;
};

/// CSV with header `obs_id,k1_y1,...,kK_yM,label`, 17 significant digits.
void write_meta_csv(std::ostream& out, const MetaMatrix& meta, std::span<const int> labels);

/// Parses the layout written by write_meta_csv. Labels are resolved against `catalog`.
std::pair<MetaMatrix, std::vector<int>> read_meta_csv(std::istream& in, const ClassCatalog& catalog);

/// 17 significant digits; reads back to the same double.
std::string format_exact(double value);

/// Shortest decimal text that reads back to the same double.
std::string format_shortest(double value);

}  // namespace granulex
