#pragma once

// Straightforward reference implementations used to check the library. They
// favour clarity over speed: long double accumulators, no pairwise sums, and
// textbook formulas that differ from the production code paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "eqr/rng.hpp"

namespace oracle {

using ld = long double;

inline double kl(std::span<const double> p, std::span<const double> q) {
  ld s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) s += static_cast<ld>(p[i]) * std::log(static_cast<ld>(p[i]) / q[i]);
  }
  return static_cast<double>(s);
}

// Entropy-of-mixture form: H(m) - (H(p) + H(q)) / 2.
inline double js(std::span<const double> p, std::span<const double> q) {
  auto h = [](ld x) { return x > 0 ? -x * std::log(x) : ld(0); };
  ld s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const ld m = (static_cast<ld>(p[i]) + q[i]) / 2;
    s += h(m) - (h(p[i]) + h(q[i])) / 2;
  }
  return static_cast<double>(s);
}

// Bhattacharyya form: sqrt(1 - sum sqrt(p q)).
inline double hellinger(std::span<const double> p, std::span<const double> q) {
  ld bc = 0;
  for (std::size_t i = 0; i < p.size(); ++i) bc += std::sqrt(static_cast<ld>(p[i]) * q[i]);
  return static_cast<double>(std::sqrt(std::max<ld>(0, 1 - bc)));
}

inline double cosine(std::span<const double> p, std::span<const double> q) {
  ld dot = 0, pp = 0, qq = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dot += static_cast<ld>(p[i]) * q[i];
    pp += static_cast<ld>(p[i]) * p[i];
    qq += static_cast<ld>(q[i]) * q[i];
  }
  return static_cast<double>(dot / std::sqrt(pp * qq));
}

inline double entropy(std::span<const double> p) {
  ld s = 0;
  for (double x : p) {
    if (x > 0) s -= static_cast<ld>(x) * std::log(static_cast<ld>(x));
  }
  return static_cast<double>(s);
}

inline std::vector<double> softmax(std::span<const double> row) {
  ld z = 0;
  for (double x : row) z += std::exp(static_cast<ld>(x));
  std::vector<double> out;
  for (double x : row) out.push_back(static_cast<double>(std::exp(static_cast<ld>(x)) / z));
  return out;
}

inline std::vector<double> smooth(std::span<const double> p, double eps) {
  ld total = 0;
  for (double x : p) total += static_cast<ld>(x) + eps;
  std::vector<double> out;
  for (double x : p) out.push_back(static_cast<double>((static_cast<ld>(x) + eps) / total));
  return out;
}

// Mann-Whitney statistic by counting every positive/negative pair.
inline double auc(std::span<const int> labels, std::span<const double> scores) {
  ld wins = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1;
      else if (scores[i] == scores[j]) wins += 0.5L;
    }
  }
  return static_cast<double>(wins / pairs);
}

// Slope from the normal equations in raw sums.
inline double slope(std::span<const double> y) {
  const ld k = static_cast<ld>(y.size());
  if (y.size() < 2) return 0.0;
  ld sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const ld x = static_cast<ld>(i + 1);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  return static_cast<double>((k * sxy - sx * sy) / (k * sxx - sx * sx));
}

inline std::vector<double> random_distribution(eqr::Rng& rng, std::size_t k) {
  std::vector<double> p(k);
  double total = 0;
  for (auto& x : p) {
    x = -std::log(1.0 - rng.uniform()) + 1e-3;  // exponential draws, Dirichlet(1)-like
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

}  // namespace oracle
