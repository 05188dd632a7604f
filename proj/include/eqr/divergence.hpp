#pragma once

#include <array>
#include <span>
#include <string_view>

#include "eqr/trace_model.hpp"

namespace eqr {

enum class MetricKind { kKl, kJs, kHellinger, kCosine, kEntropyDiff };

inline constexpr std::array<MetricKind, 5> kAllMetrics = {
    MetricKind::kKl, MetricKind::kJs, MetricKind::kHellinger, MetricKind::kCosine,
    MetricKind::kEntropyDiff};

std::string_view to_string(MetricKind kind);
// Accepts the canonical names (kl, js, hellinger, cosine, entropy_diff).
// Throws kInvalidArgument otherwise.
MetricKind metric_from_string(std::string_view name);

// All values in nats. Sums run pairwise over the vocabulary in index order.

// KL(p || q). Terms with p(x) = 0 contribute 0; q must be strictly positive
// (smooth it first) or kNonPositiveQ is thrown.
double kl(std::span<const double> p, std::span<const double> q);

// Jensen-Shannon divergence, bounded by ln 2.
double js(std::span<const double> p, std::span<const double> q);

// (1/sqrt 2) * || sqrt p - sqrt q ||, in [0, 1].
double hellinger(std::span<const double> p, std::span<const double> q);

// p.q / (|p| |q|). Throws kZeroVector for an all-zero argument.
double cosine(std::span<const double> p, std::span<const double> q);

// H(next) - H(curr).
double entropy_diff_signed(std::span<const double> next, std::span<const double> curr);

// |H(p) - H(final)|.
double entropy_dev_abs(std::span<const double> p, std::span<const double> final_step);

inline double kl(const StepDistribution& p, const StepDistribution& q) {
  return kl(p.probs, q.probs);
}
inline double js(const StepDistribution& p, const StepDistribution& q) {
  return js(p.probs, q.probs);
}
inline double hellinger(const StepDistribution& p, const StepDistribution& q) {
  return hellinger(p.probs, q.probs);
}
inline double cosine(const StepDistribution& p, const StepDistribution& q) {
  return cosine(p.probs, q.probs);
}

}  // namespace eqr
