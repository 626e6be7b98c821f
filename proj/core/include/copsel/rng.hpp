#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace copsel {

using Rng = std::mt19937_64;

/// Stable 64-bit seed derived from a master seed and a label path.
/// The hash is fixed (FNV-1a over the master bytes and each label),
/// so the same inputs give the same seed on every platform and run.
std::uint64_t derive_seed(std::uint64_t master, const std::vector<std::string>& path);

inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::string_view> path) {
    std::vector<std::string> p;
    p.reserve(path.size());
    for (auto s : path) p.emplace_back(s);
    return derive_seed(master, p);
}

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double gauss(Rng& rng) {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

} // namespace copsel
