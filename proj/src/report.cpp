#include "granulex/report.hpp"

#include <cstdio>
#include <sstream>

#include "granulex/metadata.hpp"

namespace granulex {

namespace {

using ojson = nlohmann::ordered_json;

ojson wilcoxon_json(const WilcoxonResult& w) {
    return {{"verdict", to_string(w.verdict)}, {"p_value", w.p_value}, {"w_plus", w.w_plus},
            {"w_minus", w.w_minus},            {"n", w.n},             {"exact", w.exact},
            {"insufficient", w.insufficient}};
}

std::string fixed(double v, int places) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

ojson report_to_json(const ExperimentReport& report, const ojson& config_echo) {
    ojson datasets = ojson::array();
    for (const auto& dr : report.datasets) {
        ojson methods = ojson::object();
        for (const auto& name : report.methods) {
            const auto& mr = dr.methods.at(name);
            methods[name] = {{"error_mean", mr.error_mean}, {"error_variance", mr.error_variance},
                             {"f1_mean", mr.f1_mean},       {"f1_variance", mr.f1_variance},
                             {"errors", mr.errors},         {"f1", mr.f1}};
        }
        ojson bv = ojson::object();
        for (const auto& [name, b] : dr.bias_variance)
            bv[name] = {{"bias", b.bias}, {"variance", b.variance}, {"run_bias", b.run_bias}, {"run_variance", b.run_variance}};
        ojson entry = {{"name", dr.name}, {"methods", std::move(methods)}, {"bias_variance", std::move(bv)}};
        if (!dr.selected_alphas.empty()) entry["selected_alphas"] = dr.selected_alphas;
        datasets.push_back(std::move(entry));
    }

    ojson comparisons = ojson::array();
    for (const auto& c : report.comparisons) {
        ojson per_dataset = ojson::array();
        for (std::size_t d = 0; d < c.error.size(); ++d)
            per_dataset.push_back({{"dataset", report.datasets[d].name},
                                   {"error", wilcoxon_json(c.error[d])},
                                   {"f1", wilcoxon_json(c.f1[d])}});
        comparisons.push_back({{"method", c.method},
                               {"versus", c.versus},
                               {"error", {{"win", c.error_win}, {"equal", c.error_equal}, {"loss", c.error_loss}}},
                               {"f1", {{"win", c.f1_win}, {"equal", c.f1_equal}, {"loss", c.f1_loss}}},
                               {"datasets", std::move(per_dataset)}});
    }

    ojson ranks = ojson::object();
    for (const auto& name : report.methods)
        ranks[name] = {{"error", report.error_rank.at(name)}, {"f1", report.f1_rank.at(name)}};

    return {{"format", "granulex-report"},
            {"version", 1},
            {"config", config_echo},
            {"folds", report.folds},
            {"repeats", report.repeats},
            {"methods", report.methods},
            {"datasets", std::move(datasets)},
            {"comparisons", std::move(comparisons)},
            {"average_ranks", std::move(ranks)}};
}

std::string report_runs_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "dataset,method,repeat,fold,error,f1\n";
    for (const auto& dr : report.datasets)
        for (const auto& name : report.methods) {
            const auto& mr = dr.methods.at(name);
            for (std::size_t i = 0; i < mr.errors.size(); ++i)
                out << dr.name << ',' << name << ',' << i / static_cast<std::size_t>(report.folds) << ','
                    << i % static_cast<std::size_t>(report.folds) << ',' << format_exact(mr.errors[i]) << ','
                    << format_exact(mr.f1[i]) << '\n';
        }
    return out.str();
}

std::string report_summary_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "dataset,method,error_mean,error_variance,f1_mean,f1_variance,error_rank,f1_rank\n";
    for (const auto& dr : report.datasets)
        for (const auto& name : report.methods) {
            const auto& mr = dr.methods.at(name);
            out << dr.name << ',' << name << ',' << format_exact(mr.error_mean) << ',' << format_exact(mr.error_variance)
                << ',' << format_exact(mr.f1_mean) << ',' << format_exact(mr.f1_variance) << ','
                << format_exact(report.error_rank.at(name)) << ',' << format_exact(report.f1_rank.at(name)) << '\n';
        }
    return out.str();
}

std::string report_table(const ExperimentReport& report) {
    std::ostringstream out;
    std::size_t name_width = 8;
    for (const auto& m : report.methods) name_width = std::max(name_width, m.size() + 2);

    for (const char* metric : {"ERROR RATE", "F1"}) {
        const bool is_error = std::string(metric) == "ERROR RATE";
        out << metric << " (mean variance over " << report.repeats << "x" << report.folds << "-fold CV)\n";
        out << pad("method", name_width);
        for (const auto& dr : report.datasets) out << pad(dr.name, 24);
        out << '\n';
        for (const auto& name : report.methods) {
            out << pad(name, name_width);
            for (const auto& dr : report.datasets) {
                const auto& mr = dr.methods.at(name);
                const double mean = is_error ? mr.error_mean : mr.f1_mean;
                const double var = is_error ? mr.error_variance : mr.f1_variance;
                out << pad(fixed(mean, 4) + " " + fixed(var, 6), 24);
            }
            out << '\n';
        }
        out << '\n';
    }

    if (!report.comparisons.empty()) {
        out << "WILCOXON SIGNED-RANK (win/equal/loss of the granular method)\n";
        out << pad("method", 16) << pad("versus", name_width) << pad("error", 12) << "f1\n";
        for (const auto& c : report.comparisons)
            out << pad(c.method, 16) << pad(c.versus, name_width)
                << pad(std::to_string(c.error_win) + "/" + std::to_string(c.error_equal) + "/" +
                           std::to_string(c.error_loss),
                       12)
                << c.f1_win << '/' << c.f1_equal << '/' << c.f1_loss << '\n';
        out << '\n';
    }

    out << "AVERAGE RANKS\n" << pad("method", name_width) << pad("error", 10) << "f1\n";
    for (const auto& name : report.methods)
        out << pad(name, name_width) << pad(fixed(report.error_rank.at(name), 2), 10)
            << fixed(report.f1_rank.at(name), 2) << '\n';

    bool any_bv = false;
    for (const auto& dr : report.datasets) any_bv = any_bv || !dr.bias_variance.empty();
    if (any_bv) {
        out << "\nBIAS / VARIANCE (0-1 loss)\n";
        for (const auto& dr : report.datasets)
            for (const auto& [name, bv] : dr.bias_variance)
                out << pad(dr.name, 24) << pad(name, 16) << "bias " << fixed(bv.bias, 4) << "  variance "
                    << fixed(bv.variance, 4) << '\n';
    }
    return out.str();
}

}  // namespace granulex
