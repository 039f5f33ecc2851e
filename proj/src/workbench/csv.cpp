#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <fstream>
#include <sstream>

#include "granulex/error.hpp"
#include "granulex/workbench.hpp"

namespace granulex {

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    s = s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') quoted = !quoted;
        if (c == ',' && !quoted) {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

std::optional<double> to_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    const char* begin = s.data();
    if (*begin == '+') ++begin;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string join_rows(const std::vector<std::size_t>& rows) {
    std::string out;
    const std::size_t shown = std::min<std::size_t>(rows.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) out += (i ? ", " : "") + std::to_string(rows[i]);
    if (rows.size() > shown) out += ", ... (" + std::to_string(rows.size()) + " rows)";
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
};

Table read_table(std::istream& in, bool header) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_row(line);
        if (header && t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        t.rows.push_back(std::move(cells));
        t.line_numbers.push_back(line_no);
    }
    return t;
}

std::size_t resolve_label_column(const Table& table, const CsvOptions& options, std::size_t width,
                                 const std::string& name) {
    if (options.label_column == "last") return width - 1;
    std::size_t col = 0;
    auto it = std::find(table.header.begin(), table.header.end(), options.label_column);
    if (it != table.header.end()) {
        col = static_cast<std::size_t>(it - table.header.begin());
    } else if (auto idx = to_number(options.label_column); idx && *idx >= 0 && *idx == std::floor(*idx)) {
        col = static_cast<std::size_t>(*idx);
    } else {
        throw Error("label column '" + options.label_column + "' not found in '" + name + "'");
    }
    if (col >= width) throw Error("label column index out of range in '" + name + "'");
    return col;
}

}  // namespace

Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& name) {
    Table table = read_table(in, options.header);
    if (table.rows.empty()) throw Error("'" + name + "' has no data rows");
    const std::size_t width = table.rows.front().size();
    if (width < 2) throw Error("'" + name + "' needs at least one feature column and a label column");

    const std::size_t label_col = resolve_label_column(table, options, width, name);

    std::vector<std::string> labels_text;
    std::vector<std::size_t> bad_rows;
    Eigen::MatrixXd features(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(width - 1));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& cells = table.rows[r];
        if (cells.size() != width) {
            bad_rows.push_back(table.line_numbers[r]);
            continue;
        }
        Eigen::Index c_out = 0;
        bool ok = true;
        for (std::size_t c = 0; c < width; ++c) {
            if (c == label_col) continue;
            auto v = to_number(cells[c]);
            if (!v) {
                ok = false;
                break;
            }
            features(static_cast<Eigen::Index>(r), c_out++) = *v;
        }
        if (!ok || cells[label_col].empty()) bad_rows.push_back(table.line_numbers[r]);
        labels_text.push_back(cells[label_col]);
    }
    if (!bad_rows.empty())
        throw Error("'" + name + "' has missing or non-numeric values in rows " + join_rows(bad_rows));

    std::vector<std::string> catalog;
    std::vector<int> labels;
    for (const auto& text : labels_text) {
        auto it = std::find(catalog.begin(), catalog.end(), text);
        if (it == catalog.end()) {
            catalog.push_back(text);
            it = catalog.end() - 1;
        }
        labels.push_back(static_cast<int>(it - catalog.begin()));
    }
    if (catalog.size() < 2) throw Error("'" + name + "' contains a single class");
    Dataset data(std::move(features), std::move(labels), ClassCatalog(std::move(catalog)), name);
    validate_dataset(data);
    return data;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    return parse_csv(in, options, path.stem().string());
}

Eigen::MatrixXd load_observations(const std::filesystem::path& path, const CsvOptions& options, int dims) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    const std::string name = path.string();
    Table table = read_table(in, options.header);
    if (table.rows.empty()) throw Error("'" + name + "' has no data rows");
    const std::size_t width = table.rows.front().size();
    const auto d = static_cast<std::size_t>(dims);
    if (width != d && width != d + 1)
        throw Error("'" + name + "' has " + std::to_string(width) + " columns; the model expects " +
                    std::to_string(d) + " features, optionally plus a label column");
    const std::size_t skip = width == d ? width : resolve_label_column(table, options, width, name);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(d));
    std::vector<std::size_t> bad_rows;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& cells = table.rows[r];
        bool ok = cells.size() == width;
        Eigen::Index c_out = 0;
        for (std::size_t c = 0; ok && c < width; ++c) {
            if (c == skip) continue;
            if (auto v = to_number(cells[c]))
                x(static_cast<Eigen::Index>(r), c_out++) = *v;
            else
                ok = false;
        }
        if (!ok) bad_rows.push_back(table.line_numbers[r]);
    }
    if (!bad_rows.empty())
        throw Error("'" + name + "' has missing or non-numeric values in rows " + join_rows(bad_rows));
    return x;
}

}  // namespace granulex
