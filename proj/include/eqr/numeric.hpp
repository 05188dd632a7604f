#pragma once

#include <cstddef>
#include <span>

namespace eqr {

// Pairwise (tree) summation in fixed index order. The result depends only on
// the input values, never on threading, and the rounding error grows as
// O(log n) instead of O(n).
template <typename Term>
double pairwise_sum(std::size_t n, Term&& term) {
  constexpr std::size_t kBlock = 8;
  struct Recur {
    Term& term;
    double operator()(std::size_t lo, std::size_t hi) const {
      if (hi - lo <= kBlock) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        return s;
      }
      const std::size_t mid = lo + (hi - lo) / 2;
      return (*this)(lo, mid) + (*this)(mid, hi);
    }
  };
  return Recur{term}(0, n);
}

inline double pairwise_sum(std::span<const double> values) {
  return pairwise_sum(values.size(), [&](std::size_t i) { return values[i]; });
}

}  // namespace eqr
