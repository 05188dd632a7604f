#include "eqr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "eqr/error.hpp"
#include "eqr/rng.hpp"
#include "eqr/step_distributions.hpp"
#include "json.hpp"

namespace eqr {

SynthProfile coherent_profile() {
  SynthProfile p;
  p.drift = 0.05;
  p.volatility = 0.0;
  p.label = true;
  return p;
}

SynthProfile volatile_profile() {
  SynthProfile p;
  p.drift = 0.05;
  p.volatility = 1.5;
  p.jump_rate = 0.4;
  p.label = false;
  return p;
}

void validate_profile(const SynthProfile& p) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (p.vocab_size < 2) fail("vocab_size must be >= 2");
  if (p.steps_min < 2) fail("steps_min must be >= 2");
  if (p.steps_max < p.steps_min) fail("steps_max must be >= steps_min");
  if (!(p.base_concentration > 0.0) || !std::isfinite(p.base_concentration)) {
    fail("base_concentration must be positive");
  }
  if (!(p.drift >= 0.0) || !std::isfinite(p.drift)) fail("drift must be >= 0");
  if (!(p.volatility >= 0.0) || !std::isfinite(p.volatility)) fail("volatility must be >= 0");
  if (!(p.jump_rate >= 0.0 && p.jump_rate <= 1.0)) fail("jump_rate must be in [0, 1]");
}

std::string profile_to_json(const SynthProfile& p) {
  nlohmann::ordered_json j;
  j["vocab_size"] = p.vocab_size;
  j["steps_min"] = p.steps_min;
  j["steps_max"] = p.steps_max;
  j["base_concentration"] = p.base_concentration;
  j["drift"] = p.drift;
  j["volatility"] = p.volatility;
  j["jump_rate"] = p.jump_rate;
  j["converge_to_final"] = p.converge_to_final;
  j["label"] = p.label;
  return j.dump(2) + "\n";
}

SynthProfile profile_from_json(std::string_view text) {
  SynthProfile p;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::kFormat, "profile must be a JSON object");
    for (const auto& [key, v] : j.items()) {
      if (key == "vocab_size") p.vocab_size = v.get<std::size_t>();
      else if (key == "steps_min") p.steps_min = v.get<std::size_t>();
      else if (key == "steps_max") p.steps_max = v.get<std::size_t>();
      else if (key == "base_concentration") p.base_concentration = v.get<double>();
      else if (key == "drift") p.drift = v.get<double>();
      else if (key == "volatility") p.volatility = v.get<double>();
      else if (key == "jump_rate") p.jump_rate = v.get<double>();
      else if (key == "converge_to_final") p.converge_to_final = v.get<bool>();
      else if (key == "label") p.label = v.get<bool>();
      else throw Error(ErrorCode::kFormat, "unknown profile field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("profile: ") + e.what());
  }
  validate_profile(p);
  return p;
}

ReasoningChain gen_chain(const SynthProfile& profile, std::uint64_t seed) {
  validate_profile(profile);
  Rng rng(seed);
  const std::size_t v = profile.vocab_size;
  const std::size_t n =
      profile.steps_min + static_cast<std::size_t>(rng.below(profile.steps_max - profile.steps_min + 1));

  std::vector<double> z(v), target(v), mixed(v);
  for (auto& x : z) x = profile.base_concentration * rng.normal();
  for (auto& x : target) x = profile.base_concentration * rng.normal();

  ReasoningChain chain;
  chain.meta.correct = profile.label;
  chain.meta.step_count = n;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i > 1) {
      for (auto& x : z) x += profile.drift * rng.normal();
      if (rng.uniform() < profile.jump_rate) {
        for (auto& x : z) x += profile.volatility * rng.normal();
      }
    }
    if (!profile.converge_to_final) {
      chain.steps.emplace_back(softmax(z));
      continue;
    }
    const double w = (n <= 2 || i + 1 >= n)
                         ? 1.0
                         : static_cast<double>(i - 1) / static_cast<double>(n - 2);
    for (std::size_t k = 0; k < v; ++k) mixed[k] = (1.0 - w) * z[k] + w * target[k];
    chain.steps.emplace_back(softmax(mixed));
  }
  return chain;
}

TraceManifest gen_dataset(const SynthProfile& coherent, const SynthProfile& volatile_,
                          const SynthDatasetSpec& spec, const std::filesystem::path& dir) {
  if (spec.n_per_class == 0) throw Error(ErrorCode::kInvalidArgument, "n_per_class must be >= 1");
  validate_profile(coherent);
  validate_profile(volatile_);
  if (coherent.vocab_size != volatile_.vocab_size) {
    throw Error(ErrorCode::kInvalidArgument, "profiles must share vocab_size");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, dir.string() + ": " + ec.message());

  TraceManifest manifest;
  manifest.dataset_id = spec.dataset_id;
  manifest.model_id = spec.model_id;
  manifest.vocab_size = coherent.vocab_size;
  manifest.mode = StorageMode::kStepDistributions;
  manifest.dtype = spec.dtype;

  const std::size_t total = 2 * spec.n_per_class;
  for (std::size_t i = 0; i < total; ++i) {
    const bool is_coherent = i < spec.n_per_class;
    auto chain = gen_chain(is_coherent ? coherent : volatile_, derive_seed(spec.seed, i));
    char qid[32];
    std::snprintf(qid, sizeof qid, "syn-%04zu", i);
    chain.meta.question_id = qid;
    chain.meta.dataset_id = spec.dataset_id;
    chain.meta.model_id = spec.model_id;
    chain.meta.difficulty = static_cast<int>(i % 3) + 1;
    chain.meta.correct = is_coherent;

    ManifestEntry entry;
    entry.question_id = chain.meta.question_id;
    entry.file = entry.question_id + ".eqrt";
    entry.difficulty = chain.meta.difficulty;
    entry.correct = chain.meta.correct;
    entry.step_count = chain.steps.size();
    write_file_bytes(dir / entry.file, write_trace(chain, spec.dtype));
    manifest.chains.push_back(std::move(entry));
  }
  save_manifest(manifest, dir / kManifestFileName);
  return manifest;
}

}  // namespace eqr
