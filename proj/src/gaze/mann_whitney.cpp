#include "hism/gaze/mann_whitney.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hism/error.hpp"

namespace hism::gaze {

namespace {

/// Twice the midrank of every pooled observation (integers, so the DP below
/// can index by rank sum).
std::vector<long> doubled_midranks(const std::vector<double>& pooled) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<long> ranks(pooled.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const auto doubled = static_cast<long>(i + 1 + j + 1);  // (i+1) + (j+1) = 2 * midrank
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = doubled;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> first, std::span<const double> second,
                                 std::size_t exact_limit) {
  const std::size_t n1 = first.size();
  const std::size_t n2 = second.size();
  if (n1 == 0 || n2 == 0) throw Error(ErrorCode::insufficient_data, "Mann-Whitney needs two non-empty groups");
  std::vector<double> pooled(first.begin(), first.end());
  pooled.insert(pooled.end(), second.begin(), second.end());
  const auto ranks = doubled_midranks(pooled);
  const long r1_doubled = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(n1), 0L);

  MannWhitneyResult res;
  const double dn1 = static_cast<double>(n1);
  const double dn2 = static_cast<double>(n2);
  res.u = r1_doubled / 2.0 - dn1 * (dn1 + 1.0) / 2.0;
  const double mu = dn1 * dn2 / 2.0;

  if (n1 <= exact_limit && n2 <= exact_limit) {
    // count[k][s]: number of k-subsets of the pooled ranks with doubled rank sum s.
    const long max_sum = std::accumulate(ranks.begin(), ranks.end(), 0L);
    std::vector<std::vector<double>> count(n1 + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    count[0][0] = 1.0;
    for (const long r : ranks)
      for (std::size_t k = n1; k >= 1; --k)
        for (long s = max_sum; s >= r; --s)
          count[k][static_cast<std::size_t>(s)] += count[k - 1][static_cast<std::size_t>(s - r)];
    // Compare |R1 - E[R1]| in doubled units; the tolerance absorbs nothing but exact integers.
    const long expected_doubled = static_cast<long>(n1) * static_cast<long>(n1 + n2 + 1);  // 2 * n1 (N+1) / 2
    const long observed_dev = std::abs(r1_doubled - expected_doubled);
    double extreme = 0.0, total = 0.0;
    for (long s = 0; s <= max_sum; ++s) {
      const double c = count[n1][static_cast<std::size_t>(s)];
      if (c == 0.0) continue;
      total += c;
      if (std::abs(s - expected_doubled) >= observed_dev) extreme += c;
    }
    res.p_value = std::min(1.0, extreme / total);
    res.exact = true;
    return res;
  }

  const double n = dn1 + dn2;
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double var = dn1 * dn2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) {
    res.p_value = 1.0;
    return res;
  }
  const double z = std::max(0.0, std::abs(res.u - mu) - 0.5) / std::sqrt(var);
  res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

}  // namespace hism::gaze
