#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eqr/divergence.hpp"
#include "eqr/step_distributions.hpp"
#include "eqr/trace_model.hpp"

namespace eqr {

enum class Algorithm { kCsd, kSfc };

std::string_view to_string(Algorithm algorithm);
Algorithm algorithm_from_string(std::string_view name);

// One row per step pair. For CSD the pair is (i, i+1) and entropy_diff is the
// signed change H_{i+1} - H_i; for SFC the pair is (i, final) and
// entropy_diff is |H_i - H_final|.
struct StepMetrics {
  std::size_t step_index = 0;  // 1-based, in [1, n-1]
  double kl = 0.0;
  double js = 0.0;
  double hellinger = 0.0;
  double cosine = 0.0;
  double entropy_diff = 0.0;

  double get(MetricKind kind) const;
  bool operator==(const StepMetrics&) const = default;
};

struct QuantifiedChain {
  ChainMeta meta;
  Algorithm algorithm = Algorithm::kCsd;
  SmoothingConfig smoothing;
  std::vector<StepMetrics> rows;

  bool operator==(const QuantifiedChain& other) const {
    return meta == other.meta && algorithm == other.algorithm &&
           smoothing.epsilon == other.smoothing.epsilon &&
           smoothing.renormalize == other.smoothing.renormalize && rows == other.rows;
  }
};

struct QuantifiedDataset {
  std::string dataset_id;
  std::string model_id;
  Algorithm algorithm = Algorithm::kCsd;
  SmoothingConfig smoothing;
  std::vector<QuantifiedChain> chains;
};

struct SkippedChain {
  std::string question_id;
  std::size_t step_count = 0;
  std::string reason;
};

struct QuantifyResult {
  QuantifiedDataset dataset;
  std::vector<SkippedChain> skipped;
};

// Throws kChainTooShort for n < 2 and kInvalidChain for any other violation.
QuantifiedChain compute_csd(const ReasoningChain& chain, const SmoothingConfig& cfg = {});
QuantifiedChain compute_sfc(const ReasoningChain& chain, const SmoothingConfig& cfg = {});
QuantifiedChain compute(const ReasoningChain& chain, Algorithm algorithm,
                        const SmoothingConfig& cfg = {});

// Quantifies every chain listed in the manifest (files resolved relative to
// `dir`). Chains with fewer than two steps are skipped and reported. Output
// order follows the manifest regardless of `jobs`.
QuantifyResult quantify_dataset(const TraceManifest& manifest, const std::filesystem::path& dir,
                                Algorithm algorithm, const SmoothingConfig& cfg = {},
                                unsigned jobs = 1);

// ---------------------------------------------------------------------------
// Line-delimited quantified dataset file. One JSON record per chain with the
// fields question_id, dataset_id, model_id, difficulty, correct, algorithm,
// epsilon, renormalized, rows[{step_index, kl, js, hellinger, cosine,
// entropy_diff}]. Reals are printed with 17 significant digits.
// ---------------------------------------------------------------------------

std::string quantified_record(const QuantifiedChain& chain);
std::string quantified_to_jsonl(const QuantifiedDataset& dataset);

// Throws kFormat naming the 1-based line number of the first bad record.
std::vector<QuantifiedChain> quantified_from_jsonl(std::string_view text);

std::string format_real(double value);

}  // namespace eqr
