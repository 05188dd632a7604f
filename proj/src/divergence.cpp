#include "eqr/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "eqr/error.hpp"
#include "eqr/numeric.hpp"
#include "eqr/step_distributions.hpp"

namespace eqr {

namespace {

void check_lengths(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(p.size()) + " vs " + std::to_string(q.size()));
  }
  if (p.empty()) throw Error(ErrorCode::kLengthMismatch, "empty distributions");
}

// p log(p/m) with 0 log 0 = 0, where m = (p + q) / 2.
double mixture_term(double p, double q) {
  if (p <= 0.0) return 0.0;
  return p * std::log(2.0 * p / (p + q));
}

}  // namespace

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::kKl: return "kl";
    case MetricKind::kJs: return "js";
    case MetricKind::kHellinger: return "hellinger";
    case MetricKind::kCosine: return "cosine";
    case MetricKind::kEntropyDiff: return "entropy_diff";
  }
  return "?";
}

MetricKind metric_from_string(std::string_view name) {
  for (auto kind : kAllMetrics) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown metric '" + std::string(name) +
                  "' (valid: kl, js, hellinger, cosine, entropy_diff)");
}

double kl(std::span<const double> p, std::span<const double> q) {
  check_lengths(p, q);
  for (double v : q) {
    if (!(v > 0.0)) {
      throw Error(ErrorCode::kNonPositiveQ, "reference distribution has a non-positive entry");
    }
  }
  const double d = pairwise_sum(p.size(), [&](std::size_t i) {
    return p[i] > 0.0 ? p[i] * std::log(p[i] / q[i]) : 0.0;
  });
  return std::max(d, 0.0);
}

double js(std::span<const double> p, std::span<const double> q) {
  check_lengths(p, q);
  const double d = pairwise_sum(p.size(), [&](std::size_t i) {
    return 0.5 * (mixture_term(p[i], q[i]) + mixture_term(q[i], p[i]));
  });
  return std::clamp(d, 0.0, std::numbers::ln2);
}

double hellinger(std::span<const double> p, std::span<const double> q) {
  check_lengths(p, q);
  const double s = pairwise_sum(p.size(), [&](std::size_t i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    return d * d;
  });
  return std::min(std::sqrt(0.5 * s), 1.0);
}

double cosine(std::span<const double> p, std::span<const double> q) {
  check_lengths(p, q);
  const double dot = pairwise_sum(p.size(), [&](std::size_t i) { return p[i] * q[i]; });
  const double pp = pairwise_sum(p.size(), [&](std::size_t i) { return p[i] * p[i]; });
  const double qq = pairwise_sum(q.size(), [&](std::size_t i) { return q[i] * q[i]; });
  if (pp == 0.0 || qq == 0.0) throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(pp) * std::sqrt(qq)), -1.0, 1.0);
}

double entropy_diff_signed(std::span<const double> next, std::span<const double> curr) {
  return entropy(next) - entropy(curr);
}

double entropy_dev_abs(std::span<const double> p, std::span<const double> final_step) {
  return std::abs(entropy(p) - entropy(final_step));
}

}  // namespace eqr
