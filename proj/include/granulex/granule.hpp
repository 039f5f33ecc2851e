#pragma once

// Justifiable information granules over a finite numeric sample.
//
// A granule is an interval [lower, upper] around the sample median. Each bound
// is chosen independently among the sample elements on its side of the median
// by maximizing
//
//     V(b) = #{x : med <= x <= b} * exp(-alpha * |med - b|)
//
// (mirrored for the lower bound). The count is the experimental evidence and
// the exponential is the specificity of the interval.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <vector>

#include "granulex/error.hpp"

namespace granulex {

enum class Side { lower, upper };

template <std::floating_point Scalar>
struct Granule {
    Scalar lower{};
    Scalar upper{};
    Scalar alpha{};

    Scalar length() const { return upper - lower; }
    Scalar midpoint() const { return (lower + upper) / Scalar(2); }

    friend bool operator==(const Granule&, const Granule&) = default;
};

namespace detail {

template <std::floating_point Scalar>
std::vector<Scalar> sorted_sample(std::span<const Scalar> sample) {
    if (sample.empty()) throw Error("empty sample");
    std::vector<Scalar> sorted(sample.begin(), sample.end());
    for (Scalar v : sorted)
        if (!std::isfinite(v)) throw Error("non-finite sample value");
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

template <std::floating_point Scalar>
Scalar sorted_median(const std::vector<Scalar>& sorted) {
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return (sorted[n / 2 - 1] + sorted[n / 2]) / Scalar(2);
}

template <std::floating_point Scalar>
void check_alpha(Scalar alpha) {
    if (!std::isfinite(alpha) || alpha < Scalar(0)) throw Error("alpha must be finite and non-negative");
}

template <std::floating_point Scalar>
Scalar score(std::size_t covered, Scalar median, Scalar bound, Scalar alpha) {
    return static_cast<Scalar>(covered) * std::exp(-alpha * std::abs(median - bound));
}

}  // namespace detail

/// Median; the mean of the two central order statistics for even sizes.
template <std::floating_point Scalar>
Scalar median_of(std::span<const Scalar> sample) {
    return detail::sorted_median(detail::sorted_sample(sample));
}

/// Coverage times specificity for one candidate bound. `bound` must be a
/// sample element on the given side of the median. Points are counted
/// inclusively and with multiplicity.
template <std::floating_point Scalar>
Scalar evidence_score(std::span<const Scalar> sample, Scalar alpha, Scalar bound, Side side) {
    detail::check_alpha(alpha);
    const auto sorted = detail::sorted_sample(sample);
    const Scalar med = detail::sorted_median(sorted);
    if (!std::binary_search(sorted.begin(), sorted.end(), bound)) throw Error("bound is not a sample element");
    if ((side == Side::upper && bound < med) || (side == Side::lower && bound > med))
        throw Error("bound/side mismatch");

    std::size_t covered = 0;
    if (side == Side::upper) {
        covered = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), bound) -
                                           std::lower_bound(sorted.begin(), sorted.end(), med));
    } else {
        covered = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), med) -
                                           std::lower_bound(sorted.begin(), sorted.end(), bound));
    }
    return detail::score(covered, med, bound, alpha);
}

/// Optimal granule for the sample. Equal scores resolve to the candidate
/// nearest the median.
template <std::floating_point Scalar>
Granule<Scalar> construct_granule(std::span<const Scalar> sample, Scalar alpha) {
    detail::check_alpha(alpha);
    const auto sorted = detail::sorted_sample(sample);
    const Scalar med = detail::sorted_median(sorted);
    const std::size_t n = sorted.size();

    // First index with value >= med, one past the last index with value <= med.
    const std::size_t up_begin =
        static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), med) - sorted.begin());
    const std::size_t down_end =
        static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), med) - sorted.begin());

    // Walk outward from the median; duplicates share the score of their last copy.
    Scalar upper = sorted[up_begin];
    Scalar best_upper = Scalar(-1);
    for (std::size_t i = up_begin; i < n; ++i) {
        if (i + 1 < n && sorted[i + 1] == sorted[i]) continue;
        const Scalar v = detail::score(i + 1 - up_begin, med, sorted[i], alpha);
        if (v > best_upper) {
            best_upper = v;
            upper = sorted[i];
        }
    }

    Scalar lower = sorted[down_end - 1];
    Scalar best_lower = Scalar(-1);
    for (std::size_t i = down_end; i-- > 0;) {
        if (i > 0 && sorted[i - 1] == sorted[i]) continue;
        const Scalar v = detail::score(down_end - i, med, sorted[i], alpha);
        if (v > best_lower) {
            best_lower = v;
            lower = sorted[i];
        }
    }

    return {lower, upper, alpha};
}

template <std::floating_point Scalar>
Granule<Scalar> construct_granule(const std::vector<Scalar>& sample, Scalar alpha) {
    return construct_granule(std::span<const Scalar>(sample), alpha);
}

template <std::floating_point Scalar>
Scalar median_of(const std::vector<Scalar>& sample) {
    return median_of(std::span<const Scalar>(sample));
}

}  // namespace granulex
