#include "granulex/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "granulex/error.hpp"
#include "granulex/metadata.hpp"
#include "granulex/report.hpp"
#include "granulex/training.hpp"
#include "granulex/workbench.hpp"

namespace granulex {

namespace {

namespace fs = std::filesystem;

// Flags shared by the subcommands. Unset flags leave the config untouched.
struct Overrides {
    std::string config;
    std::vector<std::string> data;
    std::optional<std::string> label_column;
    bool no_header = false;
    std::optional<int> folds;
    std::optional<int> inner_folds;
    std::optional<int> repeats;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha;
    std::optional<std::string> grid;
    std::optional<std::string> h;
    std::optional<std::string> learners;
    std::optional<std::string> methods;
    std::optional<std::string> output;
};

enum class FoldsTarget { outer, inner };

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

// Precedence: built-in defaults < --config file < individual flags.
ExperimentConfig resolve(const Overrides& o, FoldsTarget folds_target) {
    ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    if (!o.data.empty()) {
        c.datasets.clear();
        for (const auto& path : o.data) {
            CsvOptions csv;
            if (o.label_column) csv.label_column = *o.label_column;
            csv.header = !o.no_header;
            const fs::path abs = fs::absolute(path).lexically_normal();
            c.datasets.push_back({abs.stem().string(), std::make_pair(abs, csv)});
        }
    } else if (o.label_column || o.no_header) {
        throw Error("--label-column and --no-header need --data");
    }
    if (o.folds) (folds_target == FoldsTarget::outer ? c.folds : c.inner_folds) = *o.folds;
    if (o.inner_folds) c.inner_folds = *o.inner_folds;
    if (o.repeats) c.repeats = *o.repeats;
    if (o.seed) c.seed = *o.seed;
    if (o.alpha && o.grid) throw Error("--alpha and --grid are mutually exclusive");
    if (o.alpha) {
        c.alpha_mode = AlphaMode::fixed;
        c.alpha = *o.alpha;
    }
    if (o.grid) {
        c.alpha_mode = AlphaMode::grid;
        c.grid = *o.grid;
    }
    if (o.h) c.h = parse_h_function(*o.h);
    if (o.learners) c.learners = parse_roster(*o.learners);
    if (o.methods) c.methods = split_list(*o.methods);
    if (o.output) c.output = *o.output;
    validate(c);
    if (c.datasets.empty()) throw Error("no dataset given (use --data or a config with 'datasets')");
    return c;
}

Dataset single_dataset(const ExperimentConfig& c) {
    if (c.datasets.size() != 1) throw Error("this command takes exactly one dataset");
    return load(c.datasets.front());
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-")
        out << text;
    else
        write_file(path, text);
}

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON experiment configuration")->check(CLI::ExistingFile);
    cmd->add_option("--data", o.data, "dataset CSV (repeatable for evaluate)");
    cmd->add_option("--label-column", o.label_column, "label column: last, a header name or a 0-based index");
    cmd->add_flag("--no-header", o.no_header, "the CSV has no header row");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--h", o.h, "de-granulation function")->check(CLI::IsMember({"h1", "h2", "h3"}));
    cmd->add_option("--learners", o.learners, "default, extended, or a comma list such as knn:k=5,lda");
}

int run_train(const Overrides& o, std::ostream& out) {
    const ExperimentConfig c = resolve(o, FoldsTarget::inner);
    const Dataset data = single_dataset(c);
    const TrainedEnsemble ensemble = train(data, c.learners, train_options(c));
    const std::string path = o.output.value_or("model.json");
    emit(path, to_json(ensemble).dump(2) + "\n", out);
    if (path != "-")
        out << "trained " << ensemble.classifiers.size() << " classifiers on '" << data.name << "', alpha "
            << format_shortest(ensemble.alpha) << ", model written to " << path << "\n";
    return 0;
}

int run_predict(const std::string& model_path, const Overrides& o, bool emit_intervals, std::ostream& out) {
    std::ifstream in(model_path);
    if (!in) throw Error("cannot read model '" + model_path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("model '" + model_path + "' is not valid JSON");
    }
    const TrainedEnsemble ensemble = ensemble_from_json(j);
    if (o.data.size() != 1) throw Error("predict takes exactly one --data file");
    CsvOptions csv;
    if (o.label_column) csv.label_column = *o.label_column;
    csv.header = !o.no_header;
    const Eigen::MatrixXd x = load_observations(o.data.front(), csv, ensemble.dims());
    const auto predictions = predict(ensemble, x);

    const auto& names = ensemble.catalog.labels();
    std::ostringstream csv_out;
    csv_out << "obs_id";
    if (emit_intervals) {
        for (const auto& name : names) csv_out << ',' << name << "_lower," << name << "_upper";
        for (const auto& name : names) csv_out << ',' << name << "_ncm";
    }
    csv_out << ",decision\n";
    for (std::size_t n = 0; n < predictions.size(); ++n) {
        const auto& p = predictions[n];
        csv_out << n;
        if (emit_intervals) {
            for (const auto& g : p.intervals) csv_out << ',' << format_shortest(g.lower) << ',' << format_shortest(g.upper);
            for (Eigen::Index m = 0; m < p.membership.values.size(); ++m)
                csv_out << ',' << format_shortest(p.membership.values(m));
        }
        csv_out << ',' << ensemble.catalog.name(p.label) << '\n';
    }
    emit(o.output.value_or("-"), csv_out.str(), out);
    return 0;
}

int run_evaluate(const Overrides& o, std::ostream& out) {
    const ExperimentConfig c = resolve(o, FoldsTarget::outer);
    std::vector<Dataset> datasets;
    for (const auto& source : c.datasets) datasets.push_back(load(source));
    const ExperimentReport report = run_protocol(datasets, protocol_config(c));
    const auto echo = echo_config(c);
    const fs::path dir = c.output;
    write_file(dir / "config.json", echo.dump(2) + "\n");
    // The report describes the experiment, not where it was written.
    auto experiment = echo;
    experiment.erase("output");
    write_file(dir / "report.json", report_to_json(report, experiment).dump(2) + "\n");
    write_file(dir / "runs.csv", report_runs_csv(report));
    write_file(dir / "summary.csv", report_summary_csv(report));
    const std::string table = report_table(report);
    write_file(dir / "report.txt", table);
    out << table << "report written to " << dir.string() << "\n";
    return 0;
}

int run_alpha_curve(const Overrides& o, std::ostream& out) {
    Overrides grid_mode = o;
    grid_mode.alpha.reset();
    const ExperimentConfig c = resolve(grid_mode, FoldsTarget::inner);
    const Dataset data = single_dataset(c);
    const auto selection = cross_validated_alpha(data, make_learners(c.learners), AlphaGrid::parse(c.grid), c.h,
                                                 c.inner_folds, c.seed);
    std::ostringstream csv;
    csv << "alpha,error\n";
    for (const auto& [alpha, error] : selection.curve) csv << format_shortest(alpha) << ',' << format_shortest(error) << '\n';
    emit(o.output.value_or("-"), csv.str(), out);
    return 0;
}

std::string one_line(std::string text) {
    for (char& ch : text)
        if (ch == '\n' || ch == '\r') ch = ' ';
    return text;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Classifier aggregation with justifiable information granules", "granulex"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);

    Overrides o;
    std::string model_path;
    bool emit_intervals = false;

    auto* train_cmd = app.add_subcommand("train", "fit base learners and alpha, write a model JSON");
    add_common(train_cmd, o);
    train_cmd->add_option("--folds", o.folds, "cross-validation folds for the alpha search");
    train_cmd->add_option("--alpha", o.alpha, "fixed alpha, skips the search");
    train_cmd->add_option("--grid", o.grid, "alpha grid lo:step:hi");
    train_cmd->add_option("--output", o.output, "model path (default model.json, - for stdout)");

    auto* predict_cmd = app.add_subcommand("predict", "classify a CSV with a trained model");
    predict_cmd->add_option("--model", model_path, "model JSON")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--data", o.data, "observations CSV")->required();
    predict_cmd->add_option("--label-column", o.label_column, "label column to ignore, if present");
    predict_cmd->add_flag("--no-header", o.no_header, "the CSV has no header row");
    predict_cmd->add_flag("--emit-intervals", emit_intervals, "add per-class intervals and NCM values");
    predict_cmd->add_option("--output", o.output, "CSV path (default stdout)");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "run the cross-validation protocol and write a report");
    add_common(evaluate_cmd, o);
    evaluate_cmd->add_option("--folds", o.folds, "outer cross-validation folds");
    evaluate_cmd->add_option("--inner-folds", o.inner_folds, "folds of the inner meta-data cross-validation");
    evaluate_cmd->add_option("--repeats", o.repeats, "repetitions of the outer cross-validation");
    evaluate_cmd->add_option("--alpha", o.alpha, "alpha of the granular-fixed method");
    evaluate_cmd->add_option("--grid", o.grid, "alpha grid lo:step:hi of the granular-cv method");
    evaluate_cmd->add_option("--methods", o.methods, "comma list of methods");
    evaluate_cmd->add_option("--output", o.output, "report directory");

    auto* curve_cmd = app.add_subcommand("alpha-curve", "cross-validated error for every alpha of a grid");
    add_common(curve_cmd, o);
    curve_cmd->add_option("--folds", o.folds, "cross-validation folds");
    curve_cmd->add_option("--grid", o.grid, "alpha grid lo:step:hi");
    curve_cmd->add_option("--output", o.output, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << one_line(e.what()) << "\n";
        const CLI::App* failed = &app;
        for (const auto* sub : app.get_subcommands()) failed = sub;
        err << failed->help();
        return 2;
    }

    try {
        if (train_cmd->parsed()) return run_train(o, out);
        if (predict_cmd->parsed()) return run_predict(model_path, o, emit_intervals, out);
        if (evaluate_cmd->parsed()) return run_evaluate(o, out);
        if (curve_cmd->parsed()) return run_alpha_curve(o, out);
    } catch (const std::exception& e) {
        err << "error: " << one_line(e.what()) << "\n";
        return 1;
    }
    return 1;
}

}  // namespace granulex
