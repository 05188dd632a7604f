#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqr/reasoning_dynamics.hpp"

namespace eqr {

inline constexpr std::size_t kFeatureCount = 21;

// Column order of the feature table. Part of the file contract.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "kl_mean",  "kl_slope",  "kl_max_jump",  "kl_final",
    "js_mean",  "js_slope",  "js_max_jump",  "js_final",
    "hel_mean", "hel_slope", "hel_max_jump", "hel_final",
    "cos_mean", "cos_slope", "cos_final",
    "ent_mean", "ent_std",   "ent_final",    "ent_max_abs_jump", "ent_cumulative", "ent_trend"};

using FeatureVector = std::array<double, kFeatureCount>;

// Least-squares slope of seq against 1..k; 0 for k = 1.
double slope(std::span<const double> seq);

// max |seq[i+1] - seq[i]|; 0 for k = 1.
double max_jump(std::span<const double> seq);

FeatureVector extract_features(const QuantifiedChain& chain);

// A row of the feature table: features plus the chain metadata columns.
struct FeatureRow {
  std::string question_id;
  int difficulty = 1;
  bool correct = false;
  Algorithm algorithm = Algorithm::kCsd;
  FeatureVector features{};
};

FeatureRow feature_row(const QuantifiedChain& chain);

// Comma-separated table: the 21 feature names, then question_id, difficulty,
// correct, algorithm. One row per chain.
std::string features_to_csv(std::span<const FeatureRow> rows);
// Throws kFormat naming the 1-based line of the first malformed row.
std::vector<FeatureRow> features_from_csv(std::string_view text);

}  // namespace eqr
