#pragma once

#include <span>

#include "eqr/trace_model.hpp"

namespace eqr {

struct SmoothingConfig {
  double epsilon = 1e-7;
  bool renormalize = true;
};

// Max-subtracted softmax of one logit row. Throws kNonFiniteInput.
StepDistribution softmax(std::span<const double> row);

// Arithmetic mean of the per-token softmax rows of a step. Rows are combined
// by pairwise summation in ascending token order, so the result does not
// depend on how callers schedule work.
StepDistribution step_distribution(const StepLogits& step);

// p + eps, optionally renormalized. The output is flagged strictly positive.
StepDistribution smooth(const StepDistribution& dist, const SmoothingConfig& cfg = {});

// Shannon entropy in nats; 0 log 0 = 0.
double entropy(std::span<const double> probs);
inline double entropy(const StepDistribution& dist) { return entropy(dist.probs); }

// Distribution of a step of either storage mode (raw steps are averaged).
StepDistribution to_distribution(const Step& step);

}  // namespace eqr
