#include "villa/mann_whitney.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "villa/errors.hpp"

namespace villa {
namespace {

// counts[u] = number of arrangements of n_a and n_b items with statistic u,
// built with the recurrence f(m, n, u) = f(m - 1, n, u - n) + f(m, n - 1, u).
std::vector<double> null_counts(std::size_t n_a, std::size_t n_b) {
  const std::size_t max_u = n_a * n_b;
  // table[m][n] -> vector over u
  std::vector<std::vector<std::vector<double>>> table(
      n_a + 1, std::vector<std::vector<double>>(n_b + 1));
  for (std::size_t m = 0; m <= n_a; ++m) {
    for (std::size_t n = 0; n <= n_b; ++n) {
      auto& cur = table[m][n];
      cur.assign(m * n + 1, 0.0);
      if (m == 0 || n == 0) {
        cur[0] = 1.0;
        continue;
      }
      const auto& drop_a = table[m - 1][n];  // largest item is from a: it beats all n
      const auto& drop_b = table[m][n - 1];
      for (std::size_t u = 0; u < drop_a.size(); ++u) cur[u + n] += drop_a[u];
      for (std::size_t u = 0; u < drop_b.size(); ++u) cur[u] += drop_b[u];
    }
  }
  auto counts = std::move(table[n_a][n_b]);
  counts.resize(max_u + 1, 0.0);
  return counts;
}

}  // namespace

double mann_whitney_exact_cdf(std::size_t n_a, std::size_t n_b, double u) {
  const auto counts = null_counts(n_a, n_b);
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  double below = 0.0;
  for (std::size_t i = 0; i < counts.size() && static_cast<double>(i) <= u + 1e-9; ++i) {
    below += counts[i];
  }
  return below / total;
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 const MannWhitneyOptions& options) {
  if (a.empty() || b.empty()) {
    throw InvalidParameters("Mann-Whitney U needs at least one value in each sample");
  }
  const std::size_t n_a = a.size();
  const std::size_t n_b = b.size();
  const std::size_t n = n_a + n_b;

  struct Value {
    double x;
    bool from_a;
  };
  std::vector<Value> pooled;
  pooled.reserve(n);
  for (double x : a) pooled.push_back({x, true});
  for (double x : b) pooled.push_back({x, false});
  std::sort(pooled.begin(), pooled.end(), [](const Value& l, const Value& r) { return l.x < r.x; });

  double rank_sum_a = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  bool ties = false;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].x == pooled[i].x) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].from_a) rank_sum_a += midrank;
    }
    if (j - i > 1) {
      ties = true;
      tie_term += t * t * t - t;
    }
    i = j;
  }

  MannWhitneyResult r;
  r.n_a = n_a;
  r.n_b = n_b;
  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  r.u_a = rank_sum_a - na * (na + 1.0) / 2.0;
  r.u_b = na * nb - r.u_a;

  if (pooled.front().x == pooled.back().x) {
    r.p_two_sided = 1.0;
    return r;
  }

  if (!ties && n_a <= options.exact_max && n_b <= options.exact_max) {
    const auto counts = null_counts(n_a, n_b);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    double lower = 0.0;
    double upper = 0.0;
    for (std::size_t u = 0; u < counts.size(); ++u) {
      const double uu = static_cast<double>(u);
      if (uu <= r.u_a + 1e-9) lower += counts[u];
      if (uu >= r.u_a - 1e-9) upper += counts[u];
    }
    r.exact = true;
    r.p_two_sided = std::min(1.0, 2.0 * std::min(lower, upper) / total);
    return r;
  }

  const double mean = na * nb / 2.0;
  const double nn = static_cast<double>(n);
  const double variance = na * nb / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  if (variance <= 0.0) {
    r.p_two_sided = 1.0;
    return r;
  }
  double deviation = std::abs(r.u_a - mean);
  if (options.continuity_correction) deviation = std::max(0.0, deviation - 0.5);
  const double z = deviation / std::sqrt(variance);
  r.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

}  // namespace villa
