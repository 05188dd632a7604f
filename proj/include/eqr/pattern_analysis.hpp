#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqr/divergence.hpp"
#include "eqr/reasoning_dynamics.hpp"
#include "eqr/trace_model.hpp"

namespace eqr {

enum class Stratify { kCorrectness, kCorrectnessDifficulty };
std::string_view to_string(Stratify stratify);
Stratify stratify_from_string(std::string_view name);

struct TrajectoryStat {
  std::size_t step_index = 0;
  bool correct = false;
  std::optional<int> difficulty;  // set only for correctness x difficulty
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // population

  bool operator==(const TrajectoryStat&) const = default;
};

// Ordered by stratum (incorrect before correct, then difficulty ascending) and
// then by step index. Indices reached by fewer than min_support chains of a
// stratum are dropped.
std::vector<TrajectoryStat> trajectory_stats(std::span<const QuantifiedChain> chains,
                                             MetricKind metric, Stratify stratify,
                                             std::size_t min_support = 5);

enum class LengthGroup { kShort, kMedium, kLong };
std::string_view to_string(LengthGroup group);

struct StepLengthGrouping {
  std::size_t low = 0;   // Short: n <= low
  std::size_t high = 0;  // Medium: low < n <= high; Long: n > high

  LengthGroup classify(std::size_t steps) const;
};

// Nearest-rank tertile cut points of the step counts, with the upper cut
// moved to the next distinct count when it collides with the lower one.
// Throws kDegenerateDistribution when there are fewer than 3 distinct counts.
StepLengthGrouping infer_thresholds(std::span<const std::size_t> step_counts);

struct GroupAccuracy {
  LengthGroup group = LengthGroup::kShort;
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy_pct = 0.0;

  bool operator==(const GroupAccuracy&) const = default;
};

// One entry per non-empty group, in Short, Medium, Long order.
std::vector<GroupAccuracy> group_accuracy(std::span<const ChainMeta> chains,
                                          const StepLengthGrouping& grouping);

// Plot-data tables. Reals use 17 significant digits so parsing recovers them.
std::string trajectory_csv(std::span<const TrajectoryStat> stats);
std::vector<TrajectoryStat> trajectory_from_csv(std::string_view text);
std::string group_accuracy_csv(std::span<const GroupAccuracy> groups,
                               const StepLengthGrouping& grouping);
std::vector<GroupAccuracy> group_accuracy_from_csv(std::string_view text);

}  // namespace eqr
