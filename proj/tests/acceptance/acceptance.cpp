// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "eqr/classical_models.hpp"
#include "eqr/divergence.hpp"
#include "eqr/error.hpp"
#include "eqr/features.hpp"
#include "eqr/metrics.hpp"
#include "eqr/model_selection.hpp"
#include "eqr/pattern_analysis.hpp"
#include "eqr/reasoning_dynamics.hpp"
#include "eqr/sequential_models.hpp"
#include "eqr/step_distributions.hpp"
#include "eqr/synthetic.hpp"
#include "eqr/trace_model.hpp"
#include "golden.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace eqr;

namespace {

// Collects failed checks for one criterion; keeps the first few messages.
class Gate {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 5) messages_.push_back(what);
  }
  void note(const std::string& text) { notes_.push_back(text); }

  bool ok() const { return failures_ == 0; }
  std::size_t checks() const { return checks_; }
  std::size_t failures() const { return failures_; }
  const std::vector<std::string>& messages() const { return messages_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::vector<std::string> messages_;
  std::vector<std::string> notes_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("eqr_acceptance_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// ---------------------------------------------------------------------------

void metric_oracle(Gate& g) {
  Rng rng(1001);
  const double ln2 = std::numbers::ln2;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = oracle::random_distribution(rng, 8);
    const auto q = oracle::random_distribution(rng, 8);
    const auto r = oracle::random_distribution(rng, 8);
    const double k = kl(p, q), j = js(p, q), h = hellinger(p, q), c = cosine(p, q);
    const double ed = entropy_diff_signed(q, p);
    const double errs[] = {k - oracle::kl(p, q), j - oracle::js(p, q), h - oracle::hellinger(p, q),
                           c - oracle::cosine(p, q), ed - (oracle::entropy(q) - oracle::entropy(p))};
    for (double e : errs) worst = std::max(worst, std::abs(e));
    g.check(k >= 0.0, "KL >= 0");
    g.check(j >= 0.0 && j <= ln2, "0 <= JS <= ln 2");
    g.check(h >= 0.0 && h <= 1.0, "Hellinger in [0, 1]");
    g.check(hellinger(p, r) <= h + hellinger(q, r) + 1e-15, "Hellinger triangle inequality");
    g.check(h * h <= k / 2 + 1e-15, "Hellinger^2 <= KL / 2");
    g.check(kl(p, p) == 0.0 && js(p, p) == 0.0 && hellinger(p, p) == 0.0, "identity of indiscernibles");
  }
  g.check(worst <= 1e-10, "oracle agreement within 1e-10, worst " + fmt(worst));
  g.note("1000 pairs, max |lib - oracle| = " + fmt(worst));
}

void distribution_construction(Gate& g) {
  Rng rng(1002);
  double worst_avg = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t v = 2 + rng.below(63);
    std::vector<double> row(v), shifted(v);
    const double c = rng.uniform(-50, 50);
    for (std::size_t i = 0; i < v; ++i) {
      row[i] = 5 * rng.normal();
      shifted[i] = row[i] + c;
    }
    const auto a = softmax(row), b = softmax(shifted);
    for (std::size_t i = 0; i < v; ++i) g.check(std::abs(a.probs[i] - b.probs[i]) <= 1e-12, "softmax shift invariance");

    StepLogits step;
    step.token_count = 1 + rng.below(6);
    step.vocab_size = v;
    for (std::size_t i = 0; i < step.token_count * v; ++i) step.values.push_back(4 * rng.normal());
    const auto avg = step_distribution(step);
    for (std::size_t x = 0; x < v; ++x) {
      long double ref = 0;
      for (std::size_t t = 0; t < step.token_count; ++t) ref += oracle::softmax(step.row(t))[x];
      ref /= step.token_count;
      worst_avg = std::max(worst_avg, std::abs(avg.probs[x] - static_cast<double>(ref)));
    }

    const auto sm = smooth(avg);
    const auto arg = std::max_element(avg.probs.begin(), avg.probs.end()) - avg.probs.begin();
    g.check(std::all_of(sm.probs.begin(), sm.probs.end(), [](double p) { return p > 0.0; }), "smoothing positivity");
    g.check(std::max_element(sm.probs.begin(), sm.probs.end()) - sm.probs.begin() == arg, "argmax preserved");
  }
  g.check(worst_avg <= 1e-12, "token averaging within 1e-12 of the oracle, worst " + fmt(worst_avg));
  double worst_h = 0.0;
  for (std::size_t k = 1; k <= 64; ++k) {
    const std::vector<double> u(k, 1.0 / static_cast<double>(k));
    worst_h = std::max(worst_h, std::abs(entropy(u) - std::log(static_cast<double>(k))));
  }
  g.check(worst_h <= 1e-12, "uniform entropy ln k within 1e-12, worst " + fmt(worst_h));
  g.note("averaging error " + fmt(worst_avg) + ", ln k error " + fmt(worst_h));
}

ReasoningChain raw_chain(Rng& rng, std::size_t steps, std::size_t vocab) {
  ReasoningChain c;
  for (std::size_t s = 0; s < steps; ++s) {
    StepLogits l;
    l.token_count = 1 + rng.below(5);
    l.vocab_size = vocab;
    for (std::size_t i = 0; i < l.token_count * vocab; ++i) l.values.push_back(3 * rng.normal());
    c.steps.emplace_back(std::move(l));
  }
  c.meta.step_count = steps;
  return c;
}

void csd_sfc_structure(Gate& g) {
  Rng rng(1003);
  double worst_mode = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(10);
    const auto raw = raw_chain(rng, n, 32);
    ReasoningChain dist = raw;
    for (auto& s : dist.steps) s = step_distribution(std::get<StepLogits>(s));
    for (auto algo : {Algorithm::kCsd, Algorithm::kSfc}) {
      const auto a = compute(raw, algo), b = compute(dist, algo);
      g.check(a.rows.size() == n - 1, "row count n - 1");
      for (std::size_t i = 0; i < a.rows.size() && i < b.rows.size(); ++i) {
        for (auto m : kAllMetrics) worst_mode = std::max(worst_mode, std::abs(a.rows[i].get(m) - b.rows[i].get(m)));
      }
    }
    if (n == 2) {
      const auto c = compute_csd(raw), s = compute_sfc(raw);
      const auto &rc = c.rows[0], &rs = s.rows[0];
      g.check(rc.kl == rs.kl && rc.js == rs.js && rc.hellinger == rs.hellinger && rc.cosine == rs.cosine,
              "two-step CSD and SFC agree");
      g.check(std::abs(std::abs(rc.entropy_diff) - rs.entropy_diff) <= 1e-15, "two-step entropy sign vs absolute");
    }
  }
  // Make sure the two-step branch ran at least once.
  const auto two = raw_chain(rng, 2, 16);
  const auto c = compute_csd(two), s = compute_sfc(two);
  g.check(c.rows[0].kl == s.rows[0].kl && std::abs(std::abs(c.rows[0].entropy_diff) - s.rows[0].entropy_diff) <= 1e-15,
          "two-step CSD and SFC agree (fixed case)");
  g.check(worst_mode <= 1e-10, "raw vs dist mode within 1e-10, worst " + fmt(worst_mode));

  TempDir dir("structure");
  SynthDatasetSpec spec;
  spec.seed = 1004;
  const auto manifest = gen_dataset(coherent_profile(), volatile_profile(), spec, dir.path);
  for (auto algo : {Algorithm::kCsd, Algorithm::kSfc}) {
    const auto one = quantified_to_jsonl(quantify_dataset(manifest, dir.path, algo, {}, 1).dataset);
    const auto eight = quantified_to_jsonl(quantify_dataset(manifest, dir.path, algo, {}, 8).dataset);
    g.check(one == eight, "quantify bytes identical for 1 and 8 workers");
  }
  g.note("raw/dist max diff " + fmt(worst_mode) + "; 100-chain fixture byte-identical at 1 and 8 workers");
}

MetricSequence random_sequence(Rng& rng, std::size_t len, bool label) {
  MetricSequence s;
  s.label = label;
  for (std::size_t t = 0; t < len; ++t) {
    MetricRow r;
    for (auto& v : r) v = rng.normal();
    s.rows.push_back(r);
  }
  return s;
}

void gradient_gate(Gate& g) {
  Rng data_rng(1005);
  const std::vector<MetricSequence> seqs = {random_sequence(data_rng, 5, true), random_sequence(data_rng, 3, false)};
  const auto batch = pad_batch(seqs);
  std::string summary;
  for (auto fam : {SeqFamily::kNn, SeqFamily::kGru, SeqFamily::kLstm}) {
    TrainConfig cfg;
    cfg.l2 = 1e-3;
    auto p = init_params(fam, 8, 1006);
    auto loss_at = [&](const SeqModelParams& q) {
      Rng r(0);
      return loss_and_gradients(q, batch, cfg, r).loss;
    };
    Rng r(0);
    const auto analytic = loss_and_gradients(p, batch, cfg, r);
    double worst = 0.0;
    const double h = 1e-5;
    for (std::size_t k = 0; k < p.tensors.size(); ++k) {
      double diff2 = 0, num2 = 0, ana2 = 0;
      for (std::size_t i = 0; i < p.tensors[k].data.size(); ++i) {
        const double saved = p.tensors[k].data[i];
        p.tensors[k].data[i] = saved + h;
        const double up = loss_at(p);
        p.tensors[k].data[i] = saved - h;
        const double down = loss_at(p);
        p.tensors[k].data[i] = saved;
        const double num = (up - down) / (2 * h);
        const double ana = analytic.grads[k][i];
        diff2 += (num - ana) * (num - ana);
        num2 += num * num;
        ana2 += ana * ana;
      }
      const double rel = std::sqrt(diff2) / std::max({std::sqrt(num2), std::sqrt(ana2), 1e-12});
      worst = std::max(worst, rel);
      g.check(rel <= 1e-4, std::string(to_string(fam)) + "." + p.tensors[k].name + " relative error " + fmt(rel));
    }
    summary += std::string(summary.empty() ? "" : ", ") + std::string(to_string(fam)) + " " + fmt(worst);
  }
  g.note("worst relative error per family: " + summary);
}

struct Toy {
  FeatureMatrix x{0, 3};
  Labels y;
};

Toy toy_data(std::uint64_t seed, double sep) {
  Rng rng(seed);
  Toy t;
  for (int i = 0; i < 120; ++i) {
    const int y = i % 2;
    const double row[] = {rng.normal() + (y ? sep : -sep), rng.normal(), rng.normal() * 0.5 + 0.3 * y};
    t.x.push_row(row);
    t.y.push_back(y);
  }
  return t;
}

void solver_gates(Gate& g) {
  const auto t = toy_data(1007, 0.8);
  const auto lr = fit_lr(t.x, t.y, LRConfig{1.0, 1000, 1e-6});
  g.check(lr.converged && lr.grad_norm <= 1e-6, "LR gradient norm <= tol, got " + fmt(lr.grad_norm));

  double worst_sum = 0.0;
  for (auto kernel : {Kernel::kLinear, Kernel::kPoly, Kernel::kRbf}) {
    SVMConfig cfg;
    cfg.kernel = kernel;
    cfg.c = 1.0;
    const auto svm = fit_svm(t.x, t.y, cfg);
    double sum = 0.0;
    for (std::size_t i = 0; i < svm.alpha.size(); ++i) {
      g.check(svm.alpha[i] >= 0.0 && svm.alpha[i] <= cfg.c, "0 <= alpha <= C");
      sum += svm.alpha[i] * svm.y[i];
    }
    worst_sum = std::max(worst_sum, std::abs(sum));
    g.check(std::abs(sum) <= cfg.tol, "|sum alpha y| <= tol (" + std::string(to_string(kernel)) + ")");
  }

  const auto gbt = fit_gbt(t.x, t.y, GBTConfig{0.1, 100, 3, 1.0, 1.0});
  bool monotone = gbt.train_loss.size() == 101;
  for (std::size_t k = 1; k < gbt.train_loss.size(); ++k) monotone &= gbt.train_loss[k] <= gbt.train_loss[k - 1];
  g.check(monotone, "GBT training loss non-increasing");
  g.note("LR |grad| " + fmt(lr.grad_norm) + ", SVM max |sum alpha y| " + fmt(worst_sum) + ", GBT loss " +
         fmt(gbt.train_loss.front()) + " -> " + fmt(gbt.train_loss.back()));
}

void evaluation_oracle(Gate& g) {
  Rng rng(1008);
  double worst = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.below(499);
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.bernoulli(0.5);
      s[i] = trial % 2 ? std::round(rng.normal() * 3) : rng.normal();
    }
    y[0] = 1;
    y[1] = 0;
    worst = std::max(worst, std::abs(roc_auc(y, s) - oracle::auc(y, s)));
  }
  g.check(worst <= 1e-12, "ROC-AUC within 1e-12 of the pairwise count, worst " + fmt(worst));

  for (int trial = 0; trial < 500; ++trial) {
    Confusion c{1 + rng.below(40), rng.below(40), 1 + rng.below(40), rng.below(40)};
    const double tp = c.tp, fp = c.fp, tn = c.tn, fn = c.fn;
    g.check(accuracy(c) == (tp + tn) / (tp + fp + tn + fn), "accuracy identity");
    g.check(std::abs(balanced_accuracy(c) - 0.5 * (tp / (tp + fn) + tn / (tn + fp))) <= 1e-15,
            "balanced accuracy identity");
    g.check(f1(c) == 2 * tp / (2 * tp + fp + fn), "F1 identity");
  }

  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t pos = 2 + rng.below(80), neg = 2 + rng.below(80);
    std::vector<int> y(pos + neg, 0);
    std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(pos), 1);
    rng.shuffle(std::span<int>(y));
    const SplitSpec spec{rng.uniform(0.1, 0.9), rng.next_u64()};
    const auto a = stratified_split(y, spec), b = stratified_split(y, spec);
    g.check(a.train == b.train && a.test == b.test, "split seed determinism");
    std::size_t tpos = 0;
    for (auto i : a.test) tpos += y[i];
    const double tneg = static_cast<double>(a.test.size() - tpos);
    g.check(std::abs(tpos - spec.test_fraction * pos) <= 1.0 && std::abs(tneg - spec.test_fraction * neg) <= 1.0,
            "split proportions within one sample");
    g.check(a.train.size() + a.test.size() == y.size(), "split covers every row");
  }
  g.note("AUC max error " + fmt(worst) + "; 500 count tuples; 200 random splits");
}

LabeledData load_features_via_files(const fs::path& dir, const TraceManifest& m, Algorithm algo) {
  const auto q = quantify_dataset(m, dir, algo);
  const auto jsonl = quantified_to_jsonl(q.dataset);
  write_text_file(dir / "quantified.jsonl", jsonl);
  const auto chains = quantified_from_jsonl(read_text_file(dir / "quantified.jsonl"));
  std::vector<FeatureRow> rows;
  for (const auto& c : chains) rows.push_back(feature_row(c));
  write_text_file(dir / "features.csv", features_to_csv(rows));
  const auto parsed = features_from_csv(read_text_file(dir / "features.csv"));
  auto data = data_from_quantified(chains);
  const auto from_table = data_from_features(parsed);
  data.features = from_table.features;  // the classical path reads the emitted table
  return data;
}

void end_to_end(Gate& g) {
  const SplitSpec outer{0.2, 2024};
  SynthDatasetSpec spec;
  spec.n_per_class = 100;
  spec.seed = 2024;

  TempDir base("e2e");
  const auto manifest = gen_dataset(coherent_profile(), volatile_profile(), spec, base.path);
  g.check(manifest.chains.size() == 200 && manifest.vocab_size == 64, "200 chains, vocab 64");
  const auto data = load_features_via_files(base.path, manifest, Algorithm::kCsd);
  const auto split = stratified_split(data.labels, outer);

  ModelConfig lr;
  lr.family = ModelFamily::kLr;
  const auto lr_report = evaluate_model(fit_model(lr, data, split.train), data, split.test);

  ModelConfig gru;
  gru.family = ModelFamily::kGru;
  gru.seq.seed = 2024;
  const auto gru_report = evaluate_model(fit_model(gru, data, split.train), data, split.test);

  g.check(lr_report.f1 >= 0.90 && lr_report.roc_auc >= 0.95,
          "LR test F1 " + fmt(lr_report.f1) + ", AUC " + fmt(lr_report.roc_auc));
  g.check(gru_report.f1 >= 0.90 && gru_report.roc_auc >= 0.95,
          "GRU test F1 " + fmt(gru_report.f1) + ", AUC " + fmt(gru_report.roc_auc));
  g.note("CSD: LR F1 " + fmt(lr_report.f1) + " AUC " + fmt(lr_report.roc_auc) + "; GRU F1 " + fmt(gru_report.f1) +
         " AUC " + fmt(gru_report.roc_auc));

  // Converging volatile chains: their last steps match the final answer, which
  // hides volatility from the final-anchored view.
  TempDir conv("e2e_converge");
  auto converging = volatile_profile();
  converging.converge_to_final = true;
  const auto m2 = gen_dataset(coherent_profile(), converging, spec, conv.path);
  const auto csd = load_features_via_files(conv.path, m2, Algorithm::kCsd);
  const auto sfc = load_features_via_files(conv.path, m2, Algorithm::kSfc);
  const auto split2 = stratified_split(csd.labels, outer);
  std::string line;
  for (auto fam : {ModelFamily::kLr, ModelFamily::kSvm, ModelFamily::kGbt}) {
    ModelConfig cfg;
    cfg.family = fam;
    const double f_csd = evaluate_model(fit_model(cfg, csd, split2.train), csd, split2.test).f1;
    const double f_sfc = evaluate_model(fit_model(cfg, sfc, split2.train), sfc, split2.test).f1;
    line += std::string(line.empty() ? "" : "; ") + std::string(to_string(fam)) + " CSD " + fmt(f_csd) + " vs SFC " +
            fmt(f_sfc);
    if (fam == ModelFamily::kLr) g.check(f_csd >= f_sfc, "LR CSD F1 >= SFC F1 (" + fmt(f_csd) + " vs " + fmt(f_sfc) + ")");
  }
  g.note("converging fixtures: " + line);
}

void pattern_checks(Gate& g) {
  Rng rng(1009);
  std::vector<QuantifiedChain> chains;
  for (int i = 0; i < 120; ++i) {
    QuantifiedChain c;
    c.meta.correct = rng.bernoulli(0.5);
    c.meta.difficulty = 1 + static_cast<int>(rng.below(3));
    const std::size_t rows = 1 + rng.below(14);
    c.meta.step_count = rows + 1;
    for (std::size_t s = 1; s <= rows; ++s) {
      StepMetrics m;
      m.step_index = s;
      m.kl = rng.uniform() * 3;
      m.js = rng.uniform() * 0.6;
      m.hellinger = rng.uniform();
      m.cosine = rng.uniform();
      m.entropy_diff = rng.normal();
      c.rows.push_back(m);
    }
    chains.push_back(std::move(c));
  }
  double worst = 0.0;
  for (auto strat : {Stratify::kCorrectness, Stratify::kCorrectnessDifficulty}) {
    for (auto metric : kAllMetrics) {
      for (const auto& st : trajectory_stats(chains, metric, strat)) {
        std::vector<long double> v;
        for (const auto& c : chains) {
          if (c.meta.correct != st.correct || (st.difficulty && *st.difficulty != c.meta.difficulty)) continue;
          if (c.rows.size() >= st.step_index) v.push_back(c.rows[st.step_index - 1].get(metric));
        }
        long double mean = 0, ss = 0;
        for (auto x : v) mean += x;
        mean /= v.size();
        for (auto x : v) ss += (x - mean) * (x - mean);
        g.check(v.size() == st.n, "support count");
        worst = std::max({worst, std::abs(st.mean - static_cast<double>(mean)),
                          std::abs(st.sd - static_cast<double>(std::sqrt(ss / v.size())))});
      }
    }
  }
  g.check(worst <= 1e-12, "trajectory mean/sd within 1e-12, worst " + fmt(worst));

  // Step counts drawn in three bands: Short 3-6, Medium 7-10, Long 11-16.
  std::vector<std::size_t> counts;
  for (int i = 0; i < 100; ++i) counts.push_back(3 + rng.below(4));
  for (int i = 0; i < 100; ++i) counts.push_back(7 + rng.below(4));
  for (int i = 0; i < 100; ++i) counts.push_back(11 + rng.below(6));
  rng.shuffle(std::span<std::size_t>(counts));
  const auto th = infer_thresholds(counts);
  g.check(th.low == 6 && th.high == 10, "thresholds (" + std::to_string(th.low) + ", " + std::to_string(th.high) + ")");

  std::vector<ChainMeta> metas;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    ChainMeta m;
    m.step_count = counts[i];
    m.correct = rng.bernoulli(m.step_count <= 6 ? 0.7 : 0.4);
    correct += m.correct;
    metas.push_back(m);
  }
  const auto acc = group_accuracy(metas, th);
  double weighted = 0;
  std::size_t total = 0;
  for (const auto& a : acc) {
    weighted += a.accuracy_pct * a.total;
    total += a.total;
  }
  const double overall = 100.0 * correct / metas.size();
  g.check(total == metas.size(), "groups partition the chains");
  g.check(std::abs(weighted / total - overall) <= 1e-12, "group accuracies aggregate to the overall accuracy");
  g.note("thresholds (" + std::to_string(th.low) + ", " + std::to_string(th.high) + "), trajectory error " + fmt(worst));
}

void golden_files(Gate& g) {
  const fs::path dir = fs::path(EQR_TEST_DATA_DIR) / "golden";
  for (const auto& c : golden::cases()) {
    try {
      const auto bytes = read_file_bytes(dir / c.file);
      const auto chain = read_trace(bytes);
      g.check(write_trace(chain, c.dtype) == bytes, c.file + " re-encodes bit-exactly");
      g.check(write_trace(c.chain, c.dtype) == bytes, c.file + " matches its fixed-seed generator");
      g.check(validate_chain(chain).empty(), c.file + " validates");
    } catch (const Error& e) {
      g.check(false, c.file + ": " + e.what());
    }
  }
  try {
    read_trace(read_file_bytes(dir / golden::kCorruptedFile));
    g.check(false, "corrupted file decoded without error");
  } catch (const Error& e) {
    g.check(e.code() == ErrorCode::kChecksumMismatch, std::string("corrupted file error: ") + e.what());
  }
  g.note(std::to_string(golden::cases().size()) + " golden files plus one corrupted file");
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<void(Gate&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"metric-oracle", 5, metric_oracle},
      {"distribution-construction", 5, distribution_construction},
      {"csd-sfc-structure", 30, csd_sfc_structure},
      {"gradient-gate", 60, gradient_gate},
      {"solver-gates", 60, solver_gates},
      {"evaluation-oracle", 60, evaluation_oracle},
      {"end-to-end-synthetic", 600, end_to_end},
      {"pattern-analysis", 60, pattern_checks},
      {"format-golden-files", 60, golden_files},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Gate gate;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(gate);
    } catch (const std::exception& e) {
      gate.check(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    gate.check(secs < c.budget_s, "runtime " + fmt(secs) + " s over budget " + fmt(c.budget_s) + " s");
    const bool ok = gate.ok();
    failed += !ok;
    std::printf("%s  %-26s %7.2f s  (%zu checks)", ok ? "PASS" : "FAIL", c.name, secs, gate.checks());
    for (const auto& n : gate.notes()) std::printf("  %s", n.c_str());
    std::printf("\n");
    for (const auto& m : gate.messages()) std::printf("      - %s\n", m.c_str());
    if (gate.failures() > gate.messages().size()) {
      std::printf("      - ... %zu more\n", gate.failures() - gate.messages().size());
    }
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
