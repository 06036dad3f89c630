#pragma once

#include <cstddef>
#include <span>

namespace villa {

struct MannWhitneyResult {
  double u_a = 0.0;  // pairs (x in a, y in b) with x > y, ties counting 1/2
  double u_b = 0.0;  // n_a * n_b - u_a
  double p_two_sided = 1.0;
  bool exact = false;  // p from the exact null distribution
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

struct MannWhitneyOptions {
  /// Exact p when both samples are at most this large and there are no ties.
  std::size_t exact_max = 8;
  bool continuity_correction = true;
};

/// Two-sided Mann-Whitney U test. U uses midranks for ties. The p-value is
/// exact for small tie-free samples, otherwise the normal approximation
/// with tie and continuity corrections. Identical values across both
/// samples give p = 1. Throws InvalidParameters if either sample is empty.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 const MannWhitneyOptions& options = {});

/// P(U <= u) under the null for sample sizes (n_a, n_b), no ties.
double mann_whitney_exact_cdf(std::size_t n_a, std::size_t n_b, double u);

}  // namespace villa
