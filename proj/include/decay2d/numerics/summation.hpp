#pragma once

#include <cstddef>
#include <span>

namespace decay2d::numerics {

/// Pairwise (cascade) summation with a fixed reduction tree, so the result
/// depends only on the input order and never on how work was scheduled.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t mid = v.size() / 2;
  return pairwise_sum(v.first(mid)) + pairwise_sum(v.subspan(mid));
}

} // namespace decay2d::numerics
