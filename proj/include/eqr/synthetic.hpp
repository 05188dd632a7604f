#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "eqr/trace_model.hpp"

namespace eqr {

// Knobs for a family of synthetic chains. Steps are a random walk of logit
// vectors: every step adds drift-scaled Gaussian noise, and with probability
// jump_rate a step also takes a volatility-scaled jump.
struct SynthProfile {
  std::size_t vocab_size = 64;
  std::size_t steps_min = 6;
  std::size_t steps_max = 12;
  double base_concentration = 2.0;  // std of the initial logits
  double drift = 0.05;
  double volatility = 0.0;
  double jump_rate = 0.25;
  // Blend the walk toward a fixed target with weight (i-1)/(n-2), so that
  // steps n-1 and n both equal the target.
  bool converge_to_final = false;
  bool label = true;

  bool operator==(const SynthProfile&) const = default;
};

SynthProfile coherent_profile();
SynthProfile volatile_profile();

// Throws kInvalidArgument.
void validate_profile(const SynthProfile& profile);

std::string profile_to_json(const SynthProfile& profile);
SynthProfile profile_from_json(std::string_view text);

// Distribution-mode chain; deterministic in (profile, seed).
ReasoningChain gen_chain(const SynthProfile& profile, std::uint64_t seed);

struct SynthDatasetSpec {
  std::size_t n_per_class = 50;
  std::uint64_t seed = 0;
  Dtype dtype = Dtype::kF64;
  std::string dataset_id = "synthetic";
  std::string model_id = "synthetic";
};

// Writes n coherent chains (correct) then n volatile chains (incorrect) as
// <question_id>.eqrt plus manifest.json under `dir`. Difficulty cycles 1..3.
TraceManifest gen_dataset(const SynthProfile& coherent, const SynthProfile& volatile_,
                          const SynthDatasetSpec& spec, const std::filesystem::path& dir);

}  // namespace eqr
