#pragma once

// Operational shell: dataset ingestion, synthetic generators and the
// experiment configuration.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "granulex/dataset.hpp"
#include "granulex/evaluation.hpp"
#include "granulex/learners.hpp"
#include "granulex/training.hpp"

namespace granulex {

/// Column holding the class label: "last", a header name, or a 0-based index.
struct CsvOptions {
    std::string label_column = "last";
    bool header = true;
};

/// Labels are catalogued in order of first appearance. Rows with missing or
/// non-numeric features are rejected, all of them listed in the error.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& name);

/// Observations to classify: either exactly `dims` numeric columns or
/// `dims` features plus a label column (located as in load_csv), which is
/// ignored.
Eigen::MatrixXd load_observations(const std::filesystem::path& path, const CsvOptions& options, int dims);

enum class GeneratorKind { two_gaussians, twonorm_like, concentric_rings };

std::string to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(const std::string& name);

/// Synthetic data.
///   two-gaussians     two classes, means +/-2 on the first axis, isotropic
///                     noise with standard deviation `noise` (default 1);
///                     at the default this is a 4 sigma mean separation
///   twonorm-like      two classes, means +/-(2/sqrt(d)) on every axis,
///                     standard deviation `noise` (default 1)
///   concentric-rings  `classes` rings (default 3) of radius 1, 2, ... in the
///                     first two axes with radial noise `noise` (default
///                     0.25); remaining axes are pure noise
/// Classes are balanced (observation i has class i mod M).
struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::two_gaussians;
    int n = 200;
    int d = 2;
    std::optional<double> noise;
    std::uint64_t seed = 0;
    int classes = 2;
};

void validate(const GeneratorSpec& spec);
Dataset generate(const GeneratorSpec& spec);

struct DatasetSource {
    std::string name;
    std::variant<std::pair<std::filesystem::path, CsvOptions>, GeneratorSpec> source;
};

Dataset load(const DatasetSource& source);

enum class AlphaMode { grid, fixed };

struct ExperimentConfig {
    std::vector<DatasetSource> datasets;
    std::vector<LearnerSpec> learners = default_roster();
    std::vector<std::string> methods = default_method_names();
    AlphaMode alpha_mode = AlphaMode::grid;
    double alpha = 1.0;
    std::string grid = "0:0.1:4";
    HFunction h = HFunction::h3;
    int folds = 10;
    int repeats = 10;
    int inner_folds = 10;
    std::uint64_t seed = 0;
    double significance = 0.05;
    std::string output = "granulex-out";
};

/// Strict parse: unknown keys and invalid values are errors. Relative dataset
/// paths resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Cross-field checks (grid syntax, fold counts against generator sizes, ...).
void validate(const ExperimentConfig& config);

/// Effective configuration with every default resolved; parse_config of the
/// echo yields the same configuration.
nlohmann::ordered_json echo_config(const ExperimentConfig& config);

/// "default", "extended" or a comma-separated list of learner specs.
std::vector<LearnerSpec> parse_roster(const std::string& text);

ProtocolConfig protocol_config(const ExperimentConfig& config);
TrainOptions train_options(const ExperimentConfig& config);

}  // namespace granulex
