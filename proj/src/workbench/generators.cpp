#include <cmath>
#include <numbers>
#include <random>
#include <type_traits>

#include "granulex/error.hpp"
#include "granulex/workbench.hpp"

namespace granulex {

std::string to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::two_gaussians: return "two-gaussians";
        case GeneratorKind::twonorm_like: return "twonorm-like";
        case GeneratorKind::concentric_rings: return "concentric-rings";
    }
    throw Error("unknown generator kind");
}

GeneratorKind parse_generator_kind(const std::string& name) {
    for (auto k : {GeneratorKind::two_gaussians, GeneratorKind::twonorm_like, GeneratorKind::concentric_rings})
        if (name == to_string(k)) return k;
    throw Error("unknown generator '" + name + "'");
}

void validate(const GeneratorSpec& spec) {
    if (spec.d < 1) throw Error("generator dimension must be >= 1");
    if (spec.kind == GeneratorKind::concentric_rings && spec.d < 2) throw Error("concentric-rings needs d >= 2");
    if (spec.kind != GeneratorKind::concentric_rings && spec.classes != 2)
        throw Error(to_string(spec.kind) + " always has 2 classes");
    if (spec.classes < 2) throw Error("generator needs at least 2 classes");
    if (spec.n < 2 * spec.classes) throw Error("generator needs at least two observations per class");
    if (spec.noise && (!std::isfinite(*spec.noise) || *spec.noise < 0.0)) throw Error("generator noise must be >= 0");
}

Dataset generate(const GeneratorSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

    Eigen::MatrixXd x(spec.n, spec.d);
    std::vector<int> labels(static_cast<std::size_t>(spec.n));
    std::vector<std::string> names;
    for (int m = 0; m < spec.classes; ++m) names.push_back("class" + std::to_string(m));

    for (int i = 0; i < spec.n; ++i) {
        const int label = i % spec.classes;
        labels[static_cast<std::size_t>(i)] = label;
        const double sign = label == 0 ? 1.0 : -1.0;
        switch (spec.kind) {
            case GeneratorKind::two_gaussians: {
                const double sd = spec.noise.value_or(1.0);
                for (int j = 0; j < spec.d; ++j) x(i, j) = sd * gauss(rng);
                x(i, 0) += 2.0 * sign;
                break;
            }
            case GeneratorKind::twonorm_like: {
                const double sd = spec.noise.value_or(1.0);
                const double a = 2.0 / std::sqrt(static_cast<double>(spec.d));
                for (int j = 0; j < spec.d; ++j) x(i, j) = sign * a + sd * gauss(rng);
                break;
            }
            case GeneratorKind::concentric_rings: {
                const double sd = spec.noise.value_or(0.25);
                const double radius = label + 1.0 + sd * gauss(rng);
                const double theta = angle(rng);
                x(i, 0) = radius * std::cos(theta);
                x(i, 1) = radius * std::sin(theta);
                for (int j = 2; j < spec.d; ++j) x(i, j) = sd * gauss(rng);
                break;
            }
        }
    }
    return Dataset(std::move(x), std::move(labels), ClassCatalog(std::move(names)), to_string(spec.kind));
}

Dataset load(const DatasetSource& source) {
    Dataset data = std::visit(
        [](const auto& s) -> Dataset {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, GeneratorSpec>)
                return generate(s);
            else
                return load_csv(s.first, s.second);
        },
        source.source);
    if (!source.name.empty()) data.name = source.name;
    return data;
}

}  // namespace granulex
