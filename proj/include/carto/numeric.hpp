#pragma once

#include <cstdint>

namespace carto {

/// Absolute tolerance used for every description-length comparison.
inline constexpr double kDlTolerance = 1e-9;

/// ln(n!) for n >= 0, served from a lazily built lgamma table for small n.
double lnFactorial(std::int64_t n);

/// ln C(n, k). Returns 0 whenever k == 0 (including n < 0), so empty
/// blocks and zero edge counts contribute nothing to sums of binomials.
double lnBinom(std::int64_t n, std::int64_t k);

}  // namespace carto
