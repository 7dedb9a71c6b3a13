#pragma once

#include <span>
#include <string>

namespace hism::gaze {

struct MannWhitneyResult {
  double u = 0.0;  // U of the first sample: R1 - n1 (n1 + 1) / 2
  double p_value = 1.0;
  bool exact = false;
};

/// Two-sided Mann-Whitney U test. Uses the exact permutation distribution
/// (midranks, so ties are handled) when both groups have at most
/// `exact_limit` observations, otherwise the tie-corrected normal
/// approximation with continuity correction.
MannWhitneyResult mann_whitney_u(std::span<const double> first, std::span<const double> second,
                                 std::size_t exact_limit = 20);

}  // namespace hism::gaze
