#include "granulex/metadata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "granulex/error.hpp"

namespace granulex {

ClassCatalog::ClassCatalog(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) throw Error("class catalog needs at least 2 classes");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw Error("class labels must be unique");
}

std::optional<int> ClassCatalog::index_of(const std::string& name) const {
    auto it = std::find(labels_.begin(), labels_.end(), name);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<int>(it - labels_.begin());
}

MetaProfile::MetaProfile(Eigen::MatrixXd s, std::vector<std::string> ids)
    : scores(std::move(s)), classifier_ids(std::move(ids)) {
    if (classifier_ids.empty()) {
        for (int k = 0; k < scores.rows(); ++k) classifier_ids.push_back("k" + std::to_string(k + 1));
    }
    if (static_cast<Eigen::Index>(classifier_ids.size()) != scores.rows())
        throw Error("classifier id count does not match profile rows");
}

std::vector<double> column_sample(const MetaProfile& profile, int class_index) {
    if (class_index < 0 || class_index >= profile.classes())
        throw Error("class index " + std::to_string(class_index) + " out of range");
    std::vector<double> out(static_cast<std::size_t>(profile.classifiers()));
    for (int k = 0; k < profile.classifiers(); ++k) out[static_cast<std::size_t>(k)] = profile.scores(k, class_index);
    return out;
}

std::vector<RowViolation> validate(MetaProfile& profile) {
    std::vector<RowViolation> violations;
    for (int k = 0; k < profile.classifiers(); ++k) {
        auto row = profile.scores.row(k);
        const double sum = row.sum();
        if (!row.allFinite()) {
            violations.push_back({k, sum, "non-finite entry"});
            continue;
        }
        if (row.minCoeff() < -kRowTolerance || row.maxCoeff() > 1.0 + kRowTolerance) {
            violations.push_back({k, sum, "entry outside [0,1]"});
            continue;
        }
        if (std::abs(sum - 1.0) > kRowTolerance) {
            violations.push_back({k, sum, "row sum " + format_exact(sum) + " deviates from 1"});
            continue;
        }
        row = row.cwiseMax(0.0).cwiseMin(1.0);
        row /= row.sum();
    }
    return violations;
}

void require_valid(MetaProfile& profile) {
    auto violations = validate(profile);
    if (!violations.empty()) {
        const auto& v = violations.front();
        throw Error("invalid profile row " + std::to_string(v.row) + ": " + v.reason);
    }
}

MetaMatrix::MetaMatrix(std::vector<MetaProfile> rows, ClassCatalog catalog)
    : rows_(std::move(rows)), catalog_(std::move(catalog)) {
    for (const auto& r : rows_) {
        if (r.classes() != catalog_.size()) throw Error("profile class count does not match catalog");
        if (r.classifiers() != rows_.front().classifiers() || r.classifier_ids != rows_.front().classifier_ids)
            throw Error("profiles must share classifier count and order");
    }
}

Eigen::MatrixXd MetaMatrix::flatten() const {
    const int k_count = classifiers();
    const int m_count = classes();
    Eigen::MatrixXd out(size(), k_count * m_count);
    for (int n = 0; n < size(); ++n)
        for (int k = 0; k < k_count; ++k)
            for (int m = 0; m < m_count; ++m) out(n, k * m_count + m) = rows_[static_cast<std::size_t>(n)].scores(k, m);
    return out;
}

std::string format_exact(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string format_shortest(double value) {
    char buf[40];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

void write_meta_csv(std::ostream& out, const MetaMatrix& meta, std::span<const int> labels) {
    if (static_cast<int>(labels.size()) != meta.size()) throw Error("label count does not match meta-data rows");
    out << "obs_id";
    for (int k = 1; k <= meta.classifiers(); ++k)
        for (int m = 1; m <= meta.classes(); ++m) out << ",k" << k << "_y" << m;
    out << ",label\n";
    const Eigen::MatrixXd flat = meta.flatten();
    for (int n = 0; n < meta.size(); ++n) {
        out << n;
        for (Eigen::Index c = 0; c < flat.cols(); ++c) out << ',' << format_exact(flat(n, c));
        out << ',' << meta.catalog().name(labels[static_cast<std::size_t>(n)]) << '\n';
    }
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("not a number: '" + s + "'");
    return v;
}

}  // namespace

std::pair<MetaMatrix, std::vector<int>> read_meta_csv(std::istream& in, const ClassCatalog& catalog) {
    std::string line;
    if (!std::getline(in, line)) throw Error("empty meta-data file");
    const auto header = split(line);
    const int m_count = catalog.size();
    const int width = static_cast<int>(header.size()) - 2;
    if (width <= 0 || width % m_count != 0) throw Error("meta-data header does not match the catalog");
    const int k_count = width / m_count;

    std::vector<MetaProfile> rows;
    std::vector<int> labels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (static_cast<int>(cells.size()) != width + 2) throw Error("meta-data row has wrong column count");
        Eigen::MatrixXd scores(k_count, m_count);
        for (int k = 0; k < k_count; ++k)
            for (int m = 0; m < m_count; ++m)
                scores(k, m) = parse_double(cells[static_cast<std::size_t>(1 + k * m_count + m)]);
        auto label = catalog.index_of(cells.back());
        if (!label) throw Error("unknown label '" + cells.back() + "'");
        rows.emplace_back(std::move(scores));
        labels.push_back(*label);
    }
    return {MetaMatrix(std::move(rows), catalog), std::move(labels)};
}

}  // namespace granulex
