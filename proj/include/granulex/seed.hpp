#pragma once

#include <cstdint>
#include <initializer_list>

namespace granulex {

/// One step of the splitmix64 generator.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a child seed from a master seed and a path of indices
/// (e.g. {dataset, repeat, fold}). The result depends only on the inputs,
/// never on the order in which tasks are scheduled.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t p : path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

}  // namespace granulex
