#include <cmath>
#include <fstream>
#include <set>

#include "granulex/error.hpp"
#include "granulex/workbench.hpp"

namespace granulex {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw Error(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw Error("unknown key '" + key + "' in " + where);
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error("invalid value for '" + key + "' in " + where);
    }
}

int get_int(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw Error("'" + key + "' in " + where + " must be an integer");
    return v.get<int>();
}

DatasetSource parse_dataset(const json& j, const std::filesystem::path& base_dir, std::size_t index) {
    const std::string where = "datasets[" + std::to_string(index) + "]";
    reject_unknown(j, {"name", "path", "label_column", "header", "generator"}, where);
    DatasetSource src;
    if (j.contains("name")) src.name = get<std::string>(j, "name", where);
    if (j.contains("path") == j.contains("generator")) throw Error(where + " needs exactly one of 'path' or 'generator'");

    if (j.contains("path")) {
        std::filesystem::path path = get<std::string>(j, "path", where);
        if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
        path = std::filesystem::absolute(path).lexically_normal();
        CsvOptions opts;
        if (j.contains("label_column")) {
            const auto& lc = j.at("label_column");
            if (lc.is_number_integer())
                opts.label_column = std::to_string(lc.get<int>());
            else if (lc.is_string())
                opts.label_column = lc.get<std::string>();
            else
                throw Error("'label_column' in " + where + " must be a name or an index");
        }
        if (j.contains("header")) opts.header = get<bool>(j, "header", where);
        if (src.name.empty()) src.name = path.stem().string();
        src.source = std::make_pair(path, opts);
    } else {
        if (j.contains("label_column") || j.contains("header"))
            throw Error(where + ": 'label_column' and 'header' apply to CSV datasets only");
        const auto& g = j.at("generator");
        const std::string gwhere = where + ".generator";
        reject_unknown(g, {"kind", "n", "d", "noise", "seed", "classes"}, gwhere);
        GeneratorSpec spec;
        spec.kind = parse_generator_kind(get<std::string>(g, "kind", gwhere));
        if (spec.kind == GeneratorKind::twonorm_like) spec.d = 20;
        if (spec.kind == GeneratorKind::concentric_rings) spec.classes = 3;
        if (g.contains("n")) spec.n = get_int(g, "n", gwhere);
        if (g.contains("d")) spec.d = get_int(g, "d", gwhere);
        if (g.contains("noise")) spec.noise = get<double>(g, "noise", gwhere);
        if (g.contains("seed")) spec.seed = get<std::uint64_t>(g, "seed", gwhere);
        if (g.contains("classes")) spec.classes = get_int(g, "classes", gwhere);
        validate(spec);
        if (src.name.empty()) src.name = to_string(spec.kind);
        src.source = spec;
    }
    return src;
}

}  // namespace

std::vector<LearnerSpec> parse_roster(const std::string& text) {
    if (text == "default") return default_roster();
    if (text == "extended") return extended_roster();
    std::vector<LearnerSpec> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!item.empty()) out.push_back(parse_learner_spec(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw Error("empty learner roster");
    return out;
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
    reject_unknown(j, {"datasets", "learners", "methods", "alpha_mode", "alpha", "grid", "h", "folds", "repeats",
                       "inner_folds", "seed", "significance", "output"},
                   "config");
    ExperimentConfig c;
    const std::string where = "config";
    if (j.contains("datasets")) {
        if (!j.at("datasets").is_array()) throw Error("'datasets' must be an array");
        std::size_t i = 0;
        for (const auto& d : j.at("datasets")) c.datasets.push_back(parse_dataset(d, base_dir, i++));
    }
    if (j.contains("learners")) {
        const auto& l = j.at("learners");
        if (l.is_string()) {
            c.learners = parse_roster(l.get<std::string>());
        } else if (l.is_array()) {
            c.learners.clear();
            for (const auto& item : l) {
                if (!item.is_string()) throw Error("'learners' entries must be strings such as \"knn:k=5\"");
                c.learners.push_back(parse_learner_spec(item.get<std::string>()));
            }
        } else {
            throw Error("'learners' must be a roster name or an array");
        }
    }
    if (j.contains("methods")) c.methods = get<std::vector<std::string>>(j, "methods", where);
    if (j.contains("alpha_mode")) {
        const auto mode = get<std::string>(j, "alpha_mode", where);
        if (mode == "grid")
            c.alpha_mode = AlphaMode::grid;
        else if (mode == "fixed")
            c.alpha_mode = AlphaMode::fixed;
        else
            throw Error("'alpha_mode' must be \"grid\" or \"fixed\"");
    }
    if (j.contains("alpha")) c.alpha = get<double>(j, "alpha", where);
    if (j.contains("grid")) c.grid = get<std::string>(j, "grid", where);
    if (j.contains("h")) c.h = parse_h_function(get<std::string>(j, "h", where));
    if (j.contains("folds")) c.folds = get_int(j, "folds", where);
    if (j.contains("repeats")) c.repeats = get_int(j, "repeats", where);
    if (j.contains("inner_folds")) c.inner_folds = get_int(j, "inner_folds", where);
    if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", where);
    if (j.contains("significance")) c.significance = get<double>(j, "significance", where);
    if (j.contains("output")) c.output = get<std::string>(j, "output", where);
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_config(j, std::filesystem::absolute(path).parent_path());
}

void validate(const ExperimentConfig& c) {
    AlphaGrid::parse(c.grid);
    if (!std::isfinite(c.alpha) || c.alpha < 0.0) throw Error("'alpha' must be finite and >= 0");
    validate(protocol_config(c));
    for (const auto& d : c.datasets)
        if (const auto* g = std::get_if<GeneratorSpec>(&d.source))
            if (g->n < c.folds * g->classes)
                throw Error("generated dataset '" + d.name + "' needs n >= folds * classes");
}

nlohmann::ordered_json echo_config(const ExperimentConfig& c) {
    using ojson = nlohmann::ordered_json;
    ojson datasets = ojson::array();
    for (const auto& d : c.datasets) {
        ojson entry = {{"name", d.name}};
        if (const auto* g = std::get_if<GeneratorSpec>(&d.source)) {
            ojson gen = {{"kind", to_string(g->kind)}, {"n", g->n}, {"d", g->d}, {"seed", g->seed}, {"classes", g->classes}};
            if (g->noise) gen["noise"] = *g->noise;
            entry["generator"] = std::move(gen);
        } else {
            const auto& [path, opts] = std::get<std::pair<std::filesystem::path, CsvOptions>>(d.source);
            entry["path"] = path.string();
            entry["label_column"] = opts.label_column;
            entry["header"] = opts.header;
        }
        datasets.push_back(std::move(entry));
    }
    ojson learners = ojson::array();
    for (const auto& l : c.learners) learners.push_back(format_learner_spec(l));
    return {{"datasets", std::move(datasets)},
            {"learners", std::move(learners)},
            {"methods", c.methods},
            {"alpha_mode", c.alpha_mode == AlphaMode::grid ? "grid" : "fixed"},
            {"alpha", c.alpha},
            {"grid", c.grid},
            {"h", to_string(c.h)},
            {"folds", c.folds},
            {"repeats", c.repeats},
            {"inner_folds", c.inner_folds},
            {"seed", c.seed},
            {"significance", c.significance},
            {"output", c.output}};
}

ProtocolConfig protocol_config(const ExperimentConfig& c) {
    ProtocolConfig p;
    p.folds = c.folds;
    p.repeats = c.repeats;
    p.seed = c.seed;
    p.methods = c.methods;
    p.significance = c.significance;
    p.learners = c.learners;
    p.grid = AlphaGrid::parse(c.grid);
    p.fixed_alpha = c.alpha;
    p.h = c.h;
    p.inner_folds = c.inner_folds;
    return p;
}

TrainOptions train_options(const ExperimentConfig& c) {
    TrainOptions t;
    if (c.alpha_mode == AlphaMode::fixed)
        t.alpha = c.alpha;
    else
        t.alpha = AlphaGrid::parse(c.grid);
    t.h = c.h;
    t.folds = c.inner_folds;
    t.seed = c.seed;
    return t;
}

}  // namespace granulex
