#include "eqr/reasoning_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "eqr/error.hpp"
#include "json.hpp"

namespace eqr {

namespace {

void check_chain(const ReasoningChain& chain) {
  const auto report = validate_chain(chain);
  for (const auto& v : report) {
    if (v.rule == Rule::kTooShort) {
      throw Error(ErrorCode::kChainTooShort,
                  "chain '" + chain.meta.question_id + "' has " +
                      std::to_string(chain.steps.size()) + " step(s)");
    }
  }
  if (!report.empty()) {
    const auto& v = report.front();
    std::string where = v.step ? " (step " + std::to_string(*v.step) + ")" : "";
    throw Error(ErrorCode::kInvalidChain, "chain '" + chain.meta.question_id + "'" + where +
                                              ": " + v.message);
  }
}

std::vector<StepDistribution> smoothed_steps(const ReasoningChain& chain,
                                             const SmoothingConfig& cfg) {
  std::vector<StepDistribution> out;
  out.reserve(chain.steps.size());
  for (const auto& step : chain.steps) out.push_back(smooth(to_distribution(step), cfg));
  return out;
}

StepMetrics pair_metrics(std::size_t index, const StepDistribution& p,
                         const StepDistribution& q) {
  StepMetrics m;
  m.step_index = index;
  m.kl = kl(p, q);
  m.js = js(p, q);
  m.hellinger = hellinger(p, q);
  m.cosine = cosine(p, q);
  return m;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  return algorithm == Algorithm::kCsd ? "csd" : "sfc";
}

Algorithm algorithm_from_string(std::string_view name) {
  if (name == "csd") return Algorithm::kCsd;
  if (name == "sfc") return Algorithm::kSfc;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown algorithm '" + std::string(name) + "' (valid: csd, sfc)");
}

double StepMetrics::get(MetricKind kind) const {
  switch (kind) {
    case MetricKind::kKl: return kl;
    case MetricKind::kJs: return js;
    case MetricKind::kHellinger: return hellinger;
    case MetricKind::kCosine: return cosine;
    case MetricKind::kEntropyDiff: return entropy_diff;
  }
  return 0.0;
}

QuantifiedChain compute_csd(const ReasoningChain& chain, const SmoothingConfig& cfg) {
  check_chain(chain);
  const auto dists = smoothed_steps(chain, cfg);
  std::vector<double> entropies;
  for (const auto& d : dists) entropies.push_back(entropy(d));

  QuantifiedChain out;
  out.meta = chain.meta;
  out.algorithm = Algorithm::kCsd;
  out.smoothing = cfg;
  for (std::size_t i = 0; i + 1 < dists.size(); ++i) {
    StepMetrics m = pair_metrics(i + 1, dists[i], dists[i + 1]);
    m.entropy_diff = entropies[i + 1] - entropies[i];
    out.rows.push_back(m);
  }
  return out;
}

QuantifiedChain compute_sfc(const ReasoningChain& chain, const SmoothingConfig& cfg) {
  check_chain(chain);
  const auto dists = smoothed_steps(chain, cfg);
  const auto& final_step = dists.back();
  const double final_entropy = entropy(final_step);

  QuantifiedChain out;
  out.meta = chain.meta;
  out.algorithm = Algorithm::kSfc;
  out.smoothing = cfg;
  for (std::size_t i = 0; i + 1 < dists.size(); ++i) {
    StepMetrics m = pair_metrics(i + 1, dists[i], final_step);
    m.entropy_diff = std::abs(entropy(dists[i]) - final_entropy);
    out.rows.push_back(m);
  }
  return out;
}

QuantifiedChain compute(const ReasoningChain& chain, Algorithm algorithm,
                        const SmoothingConfig& cfg) {
  return algorithm == Algorithm::kCsd ? compute_csd(chain, cfg) : compute_sfc(chain, cfg);
}

QuantifyResult quantify_dataset(const TraceManifest& manifest, const std::filesystem::path& dir,
                                Algorithm algorithm, const SmoothingConfig& cfg,
                                unsigned jobs) {
  const std::size_t n = manifest.chains.size();
  std::vector<std::optional<QuantifiedChain>> results(n);
  std::vector<std::optional<SkippedChain>> skipped(n);
  std::vector<std::exception_ptr> errors(n);

  auto work = [&](std::size_t i) {
    const auto& entry = manifest.chains[i];
    try {
      if (entry.step_count < 2) {
        skipped[i] = SkippedChain{entry.question_id, entry.step_count,
                                  "fewer than 2 steps"};
        return;
      }
      const auto chain = load_chain(manifest, entry, dir);
      results[i] = compute(chain, algorithm, cfg);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    // Strided assignment; every slot is written by exactly one worker.
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += jobs) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  QuantifyResult out;
  out.dataset.dataset_id = manifest.dataset_id;
  out.dataset.model_id = manifest.model_id;
  out.dataset.algorithm = algorithm;
  out.dataset.smoothing = cfg;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    if (skipped[i]) out.skipped.push_back(*skipped[i]);
    if (results[i]) out.dataset.chains.push_back(std::move(*results[i]));
  }
  return out;
}

std::string format_real(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kNonFiniteInput, "cannot serialize a non-finite real");
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string quantified_record(const QuantifiedChain& chain) {
  using nlohmann::json;
  std::string s;
  s.reserve(128 + chain.rows.size() * 160);
  s += "{\"question_id\":" + json(chain.meta.question_id).dump();
  s += ",\"dataset_id\":" + json(chain.meta.dataset_id).dump();
  s += ",\"model_id\":" + json(chain.meta.model_id).dump();
  s += ",\"difficulty\":" + std::to_string(chain.meta.difficulty);
  s += ",\"correct\":" + std::string(chain.meta.correct ? "true" : "false");
  s += ",\"algorithm\":\"" + std::string(to_string(chain.algorithm)) + "\"";
  s += ",\"epsilon\":" + format_real(chain.smoothing.epsilon);
  s += ",\"renormalized\":" + std::string(chain.smoothing.renormalize ? "true" : "false");
  s += ",\"rows\":[";
  for (std::size_t i = 0; i < chain.rows.size(); ++i) {
    const auto& r = chain.rows[i];
    if (i) s += ",";
    s += "{\"step_index\":" + std::to_string(r.step_index);
    s += ",\"kl\":" + format_real(r.kl);
    s += ",\"js\":" + format_real(r.js);
    s += ",\"hellinger\":" + format_real(r.hellinger);
    s += ",\"cosine\":" + format_real(r.cosine);
    s += ",\"entropy_diff\":" + format_real(r.entropy_diff) + "}";
  }
  s += "]}";
  return s;
}

std::string quantified_to_jsonl(const QuantifiedDataset& dataset) {
  std::string out;
  for (const auto& chain : dataset.chains) {
    out += quantified_record(chain);
    out += '\n';
  }
  return out;
}

std::vector<QuantifiedChain> quantified_from_jsonl(std::string_view text) {
  std::vector<QuantifiedChain> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      const auto rec = nlohmann::json::parse(line);
      QuantifiedChain q;
      q.meta.question_id = rec.at("question_id").get<std::string>();
      q.meta.dataset_id = rec.at("dataset_id").get<std::string>();
      q.meta.model_id = rec.at("model_id").get<std::string>();
      q.meta.difficulty = rec.at("difficulty").get<int>();
      q.meta.correct = rec.at("correct").get<bool>();
      q.algorithm = algorithm_from_string(rec.at("algorithm").get<std::string>());
      q.smoothing.epsilon = rec.at("epsilon").get<double>();
      q.smoothing.renormalize = rec.at("renormalized").get<bool>();
      for (const auto& row : rec.at("rows")) {
        StepMetrics m;
        m.step_index = row.at("step_index").get<std::size_t>();
        m.kl = row.at("kl").get<double>();
        m.js = row.at("js").get<double>();
        m.hellinger = row.at("hellinger").get<double>();
        m.cosine = row.at("cosine").get<double>();
        m.entropy_diff = row.at("entropy_diff").get<double>();
        if (m.step_index != q.rows.size() + 1) {
          throw Error(ErrorCode::kFormat, "step_index values must be 1..n-1 consecutive");
        }
        q.rows.push_back(m);
      }
      if (q.rows.empty()) throw Error(ErrorCode::kFormat, "record has no rows");
      q.meta.step_count = q.rows.size() + 1;
      out.push_back(std::move(q));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormat, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kFormat, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace eqr
