#include "eqr/step_distributions.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "eqr/error.hpp"
#include "eqr/numeric.hpp"

namespace eqr {

namespace {

// Adds the softmax rows [lo, hi) of `step` into `acc` using a balanced
// recursion over the token range.
void accumulate_rows(const StepLogits& step, std::size_t lo, std::size_t hi,
                     std::vector<double>& acc) {
  if (hi - lo == 1) {
    acc = softmax(step.row(lo)).probs;
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  std::vector<double> right;
  accumulate_rows(step, lo, mid, acc);
  accumulate_rows(step, mid, hi, right);
  for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += right[j];
}

}  // namespace

StepDistribution softmax(std::span<const double> row) {
  if (row.empty()) throw Error(ErrorCode::kLengthMismatch, "softmax of an empty row");
  double max = -INFINITY;
  for (double v : row) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteInput, "non-finite logit");
    max = std::max(max, v);
  }
  StepDistribution out;
  out.probs.resize(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) out.probs[i] = std::exp(row[i] - max);
  const double z = pairwise_sum(out.probs);
  for (double& p : out.probs) p /= z;
  return out;
}

StepDistribution step_distribution(const StepLogits& step) {
  if (step.token_count < 1 || step.vocab_size < 1 ||
      step.values.size() != step.token_count * step.vocab_size) {
    throw Error(ErrorCode::kShapeMismatch, "logit matrix shape is inconsistent");
  }
  StepDistribution out;
  accumulate_rows(step, 0, step.token_count, out.probs);
  if (step.token_count > 1) {
    const auto t = static_cast<double>(step.token_count);
    for (double& p : out.probs) p /= t;
  }
  return out;
}

StepDistribution smooth(const StepDistribution& dist, const SmoothingConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "smoothing epsilon must be positive");
  }
  StepDistribution out;
  out.probs.resize(dist.probs.size());
  for (std::size_t i = 0; i < out.probs.size(); ++i) out.probs[i] = dist.probs[i] + cfg.epsilon;
  if (cfg.renormalize) {
    const double z = pairwise_sum(out.probs);
    for (double& p : out.probs) p /= z;
  }
  out.strictly_positive = true;
  return out;
}

double entropy(std::span<const double> probs) {
  const double h = -pairwise_sum(probs.size(), [&](std::size_t i) {
    const double p = probs[i];
    return p > 0.0 ? p * std::log(p) : 0.0;
  });
  return h == 0.0 ? 0.0 : h;  // no -0.0
}

StepDistribution to_distribution(const Step& step) {
  if (const auto* logits = std::get_if<StepLogits>(&step)) return step_distribution(*logits);
  return std::get<StepDistribution>(step);
}

}  // namespace eqr
