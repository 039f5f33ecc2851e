#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "granulex/evaluation.hpp"

namespace granulex {

/// Machine-readable report with per-run values. `config_echo` is embedded
/// verbatim under "config".
nlohmann::ordered_json report_to_json(const ExperimentReport& report, const nlohmann::ordered_json& config_echo);

/// One line per (dataset, method, repeat, fold): dataset,method,repeat,fold,error,f1.
std::string report_runs_csv(const ExperimentReport& report);

/// One line per (dataset, method) with means and variances.
std::string report_summary_csv(const ExperimentReport& report);

/// Human-readable tables: mean/variance per method and dataset, win/equal/loss
/// counts of the granular methods, average ranks and bias/variance.
std::string report_table(const ExperimentReport& report);

}  // namespace granulex
