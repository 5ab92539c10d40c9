#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace levyflow {

using Rng = std::mt19937_64;

/// Derives an independent child seed from a parent seed and a consumer label
/// (e.g. "field", "curve") plus an index. Splitting is hierarchical: a child
/// seed can be split again. Stable across platforms and builds.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label,
                          std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform double in [lo, hi). Implemented on top of the raw 64-bit stream so
/// results do not depend on the standard library's distribution objects.
double uniform(Rng& rng, double lo, double hi);

}  // namespace levyflow
