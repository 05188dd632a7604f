// eqr: command-line pipeline (synth, quantify, features, train, eval, analyze).

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "eqr/error.hpp"
#include "eqr/features.hpp"
#include "eqr/model_selection.hpp"
#include "eqr/pattern_analysis.hpp"
#include "eqr/reasoning_dynamics.hpp"
#include "eqr/synthetic.hpp"
#include "eqr/trace_model.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace eqr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitArgs = 2;
constexpr int kExitIo = 3;
constexpr int kExitFormat = 4;
constexpr int kExitData = 5;
constexpr int kExitNumeric = 6;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return kExitArgs;
    case ErrorCode::kIo:
      return kExitIo;
    case ErrorCode::kBadMagic:
    case ErrorCode::kTruncatedPayload:
    case ErrorCode::kChecksumMismatch:
    case ErrorCode::kUnsupportedVersion:
    case ErrorCode::kFormat:
    case ErrorCode::kInvalidChain:
    case ErrorCode::kEmptyChain:
    case ErrorCode::kChainTooShort:
      return kExitFormat;
    case ErrorCode::kSingleClassTraining:
    case ErrorCode::kClassTooSmall:
    case ErrorCode::kSingleClassLabels:
    case ErrorCode::kDegenerateDistribution:
      return kExitData;
    case ErrorCode::kSolverStall:
    case ErrorCode::kNonFiniteLoss:
    case ErrorCode::kNonFiniteInput:
    case ErrorCode::kNonFiniteFeature:
    case ErrorCode::kUnrepresentableValue:
    case ErrorCode::kNonPositiveQ:
    case ErrorCode::kZeroVector:
    case ErrorCode::kLengthMismatch:
    case ErrorCode::kEmptySequence:
      return kExitNumeric;
    default:
      return kExitInternal;
  }
}

struct Globals {
  bool quiet = false;
  std::string config_path;
};

Globals g_globals;

void info(const std::string& msg) {
  if (!g_globals.quiet) std::cerr << msg << '\n';
}

json run_metadata(const std::string& command, const json& config) {
  json run;
  run["tool"] = "eqr";
  run["version"] = EQR_VERSION;
  run["command"] = command;
  run["config"] = config;
  return run;
}

// Line-oriented outputs carry their run metadata in a sibling file.
void write_with_sidecar(const fs::path& path, const std::string& text, const json& run) {
  write_text_file(path, text);
  write_text_file(fs::path(path.string() + ".run.json"), run.dump(2) + "\n");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, dir.string() + ": " + ec.message());
}

template <typename F>
void parallel_for(std::size_t n, unsigned jobs, F&& body) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += jobs) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::uint64_t parse_seed_text(const std::string& text, const std::string& origin) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, origin + ": '" + text + "' is not an unsigned integer");
  }
}

std::uint64_t env_seed_or(std::uint64_t fallback) {
  const char* env = std::getenv("EQR_SEED");
  return env ? parse_seed_text(env, "EQR_SEED") : fallback;
}

// ---------------------------------------------------------------------------
// Config file: JSON whose keys mirror long flag names. Top-level scalars apply
// to every subcommand with that flag; an object keyed by a subcommand name
// applies to that subcommand only. Values become option defaults, so flags on
// the command line win.
// ---------------------------------------------------------------------------

std::string config_scalar(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw Error(ErrorCode::kInvalidArgument, "config key '" + key + "' must be a scalar or a list");
}

bool apply_config_value(CLI::App& app, const std::string& key, const json& value) {
  CLI::Option* opt = nullptr;
  try {
    opt = app.get_option("--" + key);
  } catch (const CLI::OptionNotFound&) {
    return false;
  }
  if (value.is_array()) {
    std::string joined;
    for (const auto& item : value) {
      if (!joined.empty()) joined += ' ';
      joined += config_scalar(item, key);
    }
    opt->delimiter(' ');
    opt->default_val(joined);
  } else {
    opt->default_val(config_scalar(value, key));
  }
  opt->required(false);
  return true;
}

std::optional<std::string> prescan_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

void apply_config_file(const std::string& path, CLI::App& app) {
  json cfg;
  try {
    cfg = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, path + ": " + e.what());
  }
  if (!cfg.is_object()) throw Error(ErrorCode::kFormat, path + ": config must be a JSON object");
  auto subcommands = app.get_subcommands([](CLI::App*) { return true; });
  for (const auto& [key, value] : cfg.items()) {
    if (value.is_object()) continue;
    bool used = false;
    for (auto* sub : subcommands) used |= apply_config_value(*sub, key, value);
    if (!used) throw Error(ErrorCode::kInvalidArgument, "config key '" + key + "' matches no flag");
  }
  for (const auto& [key, value] : cfg.items()) {
    if (!value.is_object()) continue;
    CLI::App* sub = nullptr;
    try {
      sub = app.get_subcommand(key);
    } catch (const CLI::OptionNotFound&) {
      throw Error(ErrorCode::kInvalidArgument, "config section '" + key + "' is not a subcommand");
    }
    for (const auto& [k, v] : value.items()) {
      if (!apply_config_value(*sub, k, v)) {
        throw Error(ErrorCode::kInvalidArgument, "config key '" + key + "." + k + "' matches no flag");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthOpts {
  std::string out;
  std::size_t n = 50;
  std::uint64_t seed = 0;
  std::string coherent;
  std::string volatile_;
  std::string dtype = "f64";
  std::size_t vocab = 0;
  bool converge = false;
  std::string dataset_id = "synthetic";
  std::string model_id = "synthetic";
};

int cmd_synth(const SynthOpts& o) {
  if (o.n == 0) throw Error(ErrorCode::kInvalidArgument, "--n must be >= 1");
  auto good = o.coherent.empty() ? coherent_profile() : profile_from_json(read_text_file(o.coherent));
  auto bad = o.volatile_.empty() ? volatile_profile() : profile_from_json(read_text_file(o.volatile_));
  good.label = true;
  bad.label = false;
  if (o.vocab != 0) good.vocab_size = bad.vocab_size = o.vocab;
  if (o.converge) bad.converge_to_final = true;

  SynthDatasetSpec spec;
  spec.n_per_class = o.n;
  spec.seed = o.seed;
  spec.dtype = dtype_from_string(o.dtype);
  spec.dataset_id = o.dataset_id;
  spec.model_id = o.model_id;
  const auto manifest = gen_dataset(good, bad, spec, o.out);

  json config;
  config["out"] = o.out;
  config["n"] = o.n;
  config["seed"] = o.seed;
  config["dtype"] = o.dtype;
  config["dataset_id"] = o.dataset_id;
  config["model_id"] = o.model_id;
  config["coherent_profile"] = json::parse(profile_to_json(good));
  config["volatile_profile"] = json::parse(profile_to_json(bad));
  write_text_file(fs::path(o.out) / "run.json", run_metadata("synth", config).dump(2) + "\n");
  info("wrote " + std::to_string(manifest.chains.size()) + " chains to " + o.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// quantify
// ---------------------------------------------------------------------------

struct QuantifyOpts {
  std::string traces;
  std::string algo = "csd";
  double epsilon = 1e-7;
  bool no_renormalize = false;
  unsigned jobs = 1;
  std::string out;
};

std::string quantified_name(Algorithm a) { return "quantified_" + std::string(to_string(a)) + ".jsonl"; }

int cmd_quantify(const QuantifyOpts& o) {
  std::vector<Algorithm> algos;
  if (o.algo == "both") {
    algos = {Algorithm::kCsd, Algorithm::kSfc};
  } else {
    algos = {algorithm_from_string(o.algo)};
  }
  if (!(o.epsilon >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "--epsilon must be >= 0");
  const fs::path dir(o.traces);
  const auto manifest = load_manifest(dir / kManifestFileName);
  ensure_dir(o.out);

  SmoothingConfig smoothing;
  smoothing.epsilon = o.epsilon;
  smoothing.renormalize = !o.no_renormalize;

  json config;
  config["traces"] = o.traces;
  config["algo"] = o.algo;
  config["epsilon"] = o.epsilon;
  config["renormalize"] = smoothing.renormalize;
  config["jobs"] = o.jobs;
  config["out"] = o.out;
  const auto run = run_metadata("quantify", config);

  std::string skip_report = "question_id,step_count,reason\n";
  for (std::size_t k = 0; k < algos.size(); ++k) {
    const auto result = quantify_dataset(manifest, dir, algos[k], smoothing, o.jobs);
    const fs::path path = fs::path(o.out) / quantified_name(algos[k]);
    write_with_sidecar(path, quantified_to_jsonl(result.dataset), run);
    info("wrote " + std::to_string(result.dataset.chains.size()) + " chains to " + path.string());
    if (k == 0) {
      for (const auto& s : result.skipped) {
        skip_report += s.question_id + ',' + std::to_string(s.step_count) + ',' + s.reason + '\n';
        info("skipped " + s.question_id + ": " + s.reason);
      }
    }
  }
  write_text_file(fs::path(o.out) / "skipped.csv", skip_report);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// features
// ---------------------------------------------------------------------------

struct FeaturesOpts {
  std::string in;
  std::string out;
  unsigned jobs = 1;
};

int cmd_features(const FeaturesOpts& o) {
  const auto chains = quantified_from_jsonl(read_text_file(o.in));
  std::vector<FeatureRow> rows(chains.size());
  parallel_for(chains.size(), o.jobs, [&](std::size_t i) { rows[i] = feature_row(chains[i]); });
  json config;
  config["in"] = o.in;
  config["out"] = o.out;
  config["jobs"] = o.jobs;
  write_with_sidecar(o.out, features_to_csv(rows), run_metadata("features", config));
  info("wrote " + std::to_string(rows.size()) + " feature rows to " + o.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train / eval
// ---------------------------------------------------------------------------

// JSONL quantified records start with '{'; anything else is a feature table.
LabeledData load_labeled(const std::string& path) {
  const auto text = read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const auto chains = quantified_from_jsonl(text);
    return data_from_quantified(chains);
  }
  if (first == std::string::npos) return LabeledData{};
  const auto rows = features_from_csv(text);
  return data_from_features(rows);
}

json parse_param_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return json(text);
  }
}

struct TrainOpts {
  std::string in;
  std::string family = "lr";
  std::string search = "none";
  std::string space;
  std::size_t n_iter = 20;
  std::vector<std::string> set;
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  double inner_fraction = 0.25;
  std::string out;
  std::string report;
};

int cmd_train(const TrainOpts& o) {
  const auto family = model_family_from_string(o.family);
  const auto data = load_labeled(o.in);
  if (data.size() == 0) throw Error(ErrorCode::kSingleClassTraining, o.in + ": no labeled rows");
  if (is_sequential(family) && data.sequences.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "sequential families need a quantified (.jsonl) input, not a feature table");
  }

  SearchSpace space;
  if (!o.space.empty()) {
    json j;
    try {
      j = json::parse(read_text_file(o.space));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormat, o.space + ": " + e.what());
    }
    if (!j.contains("family")) j["family"] = o.family;
    space = space_from_json(j);
    if (space.base.family != family) {
      throw Error(ErrorCode::kInvalidArgument, "search space family does not match --family");
    }
  } else {
    space = default_space(family);
  }
  space.base.seq.seed = o.seed;
  for (const auto& kv : o.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "--set expects key=value, got '" + kv + "'");
    apply_param(space.base, kv.substr(0, eq), parse_param_value(kv.substr(eq + 1)));
  }

  const auto split = stratified_split(data.labels, SplitSpec{o.test_fraction, o.seed});
  ModelConfig chosen = space.base;
  json trials = json::array();
  if (o.search != "none") {
    const auto method = search_method_from_string(o.search);
    const auto candidates = expand(space, method, o.n_iter, o.seed);
    const auto result = search(candidates, data, split.train, SplitSpec{o.inner_fraction, o.seed});
    for (const auto& t : result.trials) {
      json tj;
      tj["config"] = config_to_json(t.config);
      tj["ok"] = t.ok;
      if (t.ok) {
        tj["validation"] = report_to_json(t.report);
      } else {
        tj["error"] = t.error;
      }
      trials.push_back(tj);
    }
    chosen = result.trials[result.best].config;
    info("search: " + std::to_string(candidates.size()) + " candidates, best #" +
         std::to_string(result.best) + " (validation F1 " +
         format_real(result.trials[result.best].report.f1) + ")");
  }

  const auto model = fit_model(chosen, data, split.train);
  const auto test_report = evaluate_model(model, data, split.test);

  json config;
  config["in"] = o.in;
  config["family"] = o.family;
  config["search"] = o.search;
  config["space"] = o.space;
  config["n_iter"] = o.n_iter;
  config["set"] = o.set;
  config["seed"] = o.seed;
  config["test_fraction"] = o.test_fraction;
  config["inner_fraction"] = o.inner_fraction;
  config["out"] = o.out;
  config["report"] = o.report;
  const auto run = run_metadata("train", config);

  auto doc = model_to_json(model, chosen);
  doc["run"] = run;
  doc["test_report"] = report_to_json(test_report);
  write_text_file(o.out, doc.dump(2) + "\n");

  if (!o.report.empty()) {
    json rep;
    rep["run"] = run;
    rep["config"] = config_to_json(chosen);
    rep["test"] = report_to_json(test_report);
    rep["train_rows"] = split.train.size();
    rep["test_rows"] = split.test.size();
    rep["trials"] = trials;
    write_text_file(o.report, rep.dump(2) + "\n");
  }
  info("test F1 " + format_real(test_report.f1) + ", ROC-AUC " + format_real(test_report.roc_auc));
  return kExitOk;
}

struct EvalOpts {
  std::string model;
  std::string in;
  std::string rows = "test";
  std::optional<std::uint64_t> seed;
  std::optional<double> test_fraction;
  std::string out;
};

int cmd_eval(const EvalOpts& o) {
  json doc;
  try {
    doc = json::parse(read_text_file(o.model));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, o.model + ": " + e.what());
  }
  const auto [model, cfg] = model_from_json(doc);
  const auto data = load_labeled(o.in);
  if (data.size() == 0) throw Error(ErrorCode::kSingleClassLabels, o.in + ": no labeled rows");
  if (is_sequential(cfg.family) && data.sequences.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sequential models need a quantified (.jsonl) input");
  }

  // Default to the split recorded at training time so "test" means the same rows.
  const json trained = doc.contains("run") ? doc["run"].value("config", json::object()) : json::object();
  const std::uint64_t seed = o.seed.value_or(trained.value("seed", std::uint64_t{0}));
  const double fraction = o.test_fraction.value_or(trained.value("test_fraction", 0.2));

  std::vector<std::size_t> rows;
  if (o.rows == "all") {
    rows.resize(data.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  } else if (o.rows == "test") {
    rows = stratified_split(data.labels, SplitSpec{fraction, seed}).test;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "--rows must be test or all");
  }
  const auto report = evaluate_model(model, data, rows);

  json config;
  config["model"] = o.model;
  config["in"] = o.in;
  config["rows"] = o.rows;
  config["seed"] = seed;
  config["test_fraction"] = fraction;
  config["out"] = o.out;
  json rep;
  rep["run"] = run_metadata("eval", config);
  rep["model_config"] = config_to_json(cfg);
  rep["n_rows"] = rows.size();
  rep["report"] = report_to_json(report);
  const auto text = rep.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(o.out, text);
  }
  info("F1 " + format_real(report.f1) + ", ROC-AUC " + format_real(report.roc_auc));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeOpts {
  std::string in;
  std::string mode = "trajectories";
  std::string metric = "kl";
  std::size_t min_support = 5;
  std::size_t low = 0;
  std::size_t high = 0;
  std::string out;
};

std::string file_stem(const std::vector<QuantifiedChain>& chains) {
  if (chains.empty()) return "empty";
  const auto& m = chains.front().meta;
  return (m.dataset_id.empty() ? "dataset" : m.dataset_id) + "_" + (m.model_id.empty() ? "model" : m.model_id) +
         "_" + std::string(to_string(chains.front().algorithm));
}

int cmd_analyze(const AnalyzeOpts& o) {
  if (o.mode != "trajectories" && o.mode != "difficulty" && o.mode != "steplength") {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown mode '" + o.mode + "' (valid: trajectories, difficulty, steplength)");
  }
  const auto metric = metric_from_string(o.metric);
  if ((o.low == 0) != (o.high == 0) || (o.low != 0 && o.low >= o.high)) {
    throw Error(ErrorCode::kInvalidArgument, "--low and --high must be given together with low < high");
  }
  const auto chains = quantified_from_jsonl(read_text_file(o.in));
  ensure_dir(o.out);

  json config;
  config["in"] = o.in;
  config["mode"] = o.mode;
  config["metric"] = o.metric;
  config["min_support"] = o.min_support;
  config["out"] = o.out;

  fs::path path;
  std::string text;
  if (o.mode == "steplength") {
    std::vector<ChainMeta> metas;
    std::vector<std::size_t> counts;
    for (const auto& c : chains) {
      metas.push_back(c.meta);
      counts.push_back(c.meta.step_count);
    }
    StepLengthGrouping grouping{o.low, o.high};
    if (o.low == 0) grouping = infer_thresholds(counts);
    config["low"] = grouping.low;
    config["high"] = grouping.high;
    config["thresholds"] = o.low == 0 ? "inferred" : "given";
    const auto acc = group_accuracy(metas, grouping);
    path = fs::path(o.out) / (file_stem(chains) + "_steplength.csv");
    text = group_accuracy_csv(acc, grouping);
  } else {
    const auto stratify = o.mode == "trajectories" ? Stratify::kCorrectness : Stratify::kCorrectnessDifficulty;
    const auto stats = trajectory_stats(chains, metric, stratify, o.min_support);
    path = fs::path(o.out) /
           (file_stem(chains) + "_" + o.metric + "_" + std::string(to_string(stratify)) + ".csv");
    text = trajectory_csv(stats);
  }
  write_with_sidecar(path, text, run_metadata("analyze", config));
  info("wrote " + path.string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reasoning-trace divergence pipeline", "eqr"};
  app.set_version_flag("--version", std::string("eqr ") + EQR_VERSION);
  app.require_subcommand(1);
  app.add_flag("-q,--quiet", g_globals.quiet, "Suppress progress messages on stderr");
  app.add_option("--config", g_globals.config_path,
                 "JSON file of flag values (top-level or per-subcommand objects); flags win");

  std::uint64_t default_seed = 0;
  try {
    default_seed = env_seed_or(0);
  } catch (const Error& e) {
    std::cerr << "eqr: " << e.what() << '\n';
    return kExitArgs;
  }

  SynthOpts synth;
  synth.seed = default_seed;
  auto* s = app.add_subcommand("synth", "Generate synthetic traces and a manifest");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--n", synth.n, "Chains per class");
  s->add_option("--seed", synth.seed, "Seed (default: $EQR_SEED or 0)");
  s->add_option("--coherent", synth.coherent, "Profile JSON for correct chains");
  s->add_option("--volatile", synth.volatile_, "Profile JSON for incorrect chains");
  s->add_option("--dtype", synth.dtype, "f16, f32 or f64");
  s->add_option("--vocab", synth.vocab, "Override vocab_size of both profiles");
  s->add_flag("--converge", synth.converge, "Blend incorrect chains toward a final target");
  s->add_option("--dataset-id", synth.dataset_id);
  s->add_option("--model-id", synth.model_id);

  QuantifyOpts quant;
  auto* q = app.add_subcommand("quantify", "Compute step-wise divergence metrics");
  q->add_option("--traces", quant.traces, "Directory holding manifest.json")->required();
  q->add_option("--algo", quant.algo, "csd, sfc or both");
  q->add_option("--epsilon", quant.epsilon, "Smoothing constant");
  q->add_flag("--no-renormalize", quant.no_renormalize, "Skip renormalization after smoothing");
  q->add_option("--jobs", quant.jobs, "Worker threads");
  q->add_option("--out", quant.out, "Output directory")->required();

  FeaturesOpts feat;
  auto* f = app.add_subcommand("features", "Build the per-chain feature table");
  f->add_option("--in", feat.in, "Quantified .jsonl file")->required();
  f->add_option("--out", feat.out, "Output CSV")->required();
  f->add_option("--jobs", feat.jobs, "Worker threads");

  TrainOpts train;
  train.seed = default_seed;
  auto* t = app.add_subcommand("train", "Fit a classifier, optionally with a hyperparameter search");
  t->add_option("--in", train.in, "Feature CSV or quantified .jsonl")->required();
  t->add_option("--family", train.family, "lr, svm, gbt, nn, gru or lstm");
  t->add_option("--search", train.search, "none, grid or random");
  t->add_option("--space", train.space, "Search space JSON (default: built-in grid)");
  t->add_option("--n-iter", train.n_iter, "Random-search draws");
  t->add_option("--set", train.set, "Fixed parameter key=value (repeatable)");
  t->add_option("--seed", train.seed, "Seed (default: $EQR_SEED or 0)");
  t->add_option("--test-fraction", train.test_fraction, "Held-out share");
  t->add_option("--inner-fraction", train.inner_fraction, "Validation share used by the search");
  t->add_option("--out", train.out, "Model JSON")->required();
  t->add_option("--report", train.report, "Report JSON with search trials");

  EvalOpts ev;
  auto* e = app.add_subcommand("eval", "Evaluate a saved model");
  e->add_option("--model", ev.model, "Model JSON")->required();
  e->add_option("--in", ev.in, "Feature CSV or quantified .jsonl")->required();
  e->add_option("--rows", ev.rows, "test (split recorded in the model) or all");
  e->add_option("--seed", ev.seed, "Override the split seed");
  e->add_option("--test-fraction", ev.test_fraction, "Override the split fraction");
  e->add_option("--out", ev.out, "Report JSON (default: stdout)");

  AnalyzeOpts an;
  auto* a = app.add_subcommand("analyze", "Emit plot data for trajectories and step-length groups");
  a->add_option("--in", an.in, "Quantified .jsonl file")->required();
  a->add_option("--mode", an.mode, "trajectories, difficulty or steplength");
  a->add_option("--metric", an.metric, "kl, js, hellinger, cosine or entropy_diff");
  a->add_option("--min-support", an.min_support, "Minimum chains per step index");
  a->add_option("--low", an.low, "Short group upper bound (with --high)");
  a->add_option("--high", an.high, "Medium group upper bound (with --low)");
  a->add_option("--out", an.out, "Output directory")->required();

  try {
    if (const auto cfg = prescan_config(argc, argv)) apply_config_file(*cfg, app);
  } catch (const Error& err) {
    std::cerr << "eqr: " << err.what() << '\n';
    return exit_code_for(err.code());
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kExitOk : kExitArgs;
  }

  try {
    if (s->parsed()) return cmd_synth(synth);
    if (q->parsed()) return cmd_quantify(quant);
    if (f->parsed()) return cmd_features(feat);
    if (t->parsed()) return cmd_train(train);
    if (e->parsed()) return cmd_eval(ev);
    if (a->parsed()) return cmd_analyze(an);
  } catch (const Error& err) {
    std::cerr << "eqr: " << err.what() << '\n';
    return exit_code_for(err.code());
  } catch (const std::exception& err) {
    std::cerr << "eqr: internal error: " << err.what() << '\n';
    return kExitInternal;
  }
  return kExitArgs;
}
