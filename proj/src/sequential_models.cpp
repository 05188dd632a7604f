#include "eqr/sequential_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eqr/error.hpp"
#include "eqr/metrics.hpp"

namespace eqr {

namespace {

constexpr std::size_t D = kSeqChannels;

double sigm(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + e^x) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

// y[0:rows) += W[row0 + i, :] . x
void matvec_add(const std::vector<double>& w, std::size_t cols, std::size_t row0,
                std::size_t rows, const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* wr = w.data() + (row0 + i) * cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += wr[j] * x[j];
    y[i] += acc;
  }
}

// dx[0:cols) += W[row0:row0+rows, :]^T . d
void matvec_t_add(const std::vector<double>& w, std::size_t cols, std::size_t row0,
                  std::size_t rows, const double* d, double* dx) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* wr = w.data() + (row0 + i) * cols;
    const double di = d[i];
    if (di == 0.0) continue;
    for (std::size_t j = 0; j < cols; ++j) dx[j] += wr[j] * di;
  }
}

// dW[row0 + i, :] += d[i] * x
void outer_add(std::vector<double>& dw, std::size_t cols, std::size_t row0, std::size_t rows,
               const double* d, const double* x) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* gr = dw.data() + (row0 + i) * cols;
    const double di = d[i];
    if (di == 0.0) continue;
    for (std::size_t j = 0; j < cols; ++j) gr[j] += di * x[j];
  }
}

// Tensor indices; the order is fixed by make_params.
struct Layout {
  std::size_t w_in = 0, b_in = 0, w_hh = 0, w_out = 0, b_out = 0;
};

Layout layout_of(const SeqModelParams& p) {
  Layout l;
  if (p.family == SeqFamily::kNn) {
    l = {0, 1, 0, 2, 3};
  } else {
    l = {0, 2, 1, 3, 4};
  }
  return l;
}

std::size_t gate_count(SeqFamily f) {
  switch (f) {
    case SeqFamily::kNn: return 1;
    case SeqFamily::kGru: return 3;
    case SeqFamily::kLstm: return 4;
  }
  return 1;
}

struct SeqCache {
  std::size_t len = 0;
  std::vector<double> x;      // len x D, standardized
  std::vector<double> pre;    // nn: len x H pre-activations
  std::vector<double> h;      // rnn: (len + 1) x H, h[0] = 0
  std::vector<double> c;      // lstm: (len + 1) x H
  std::vector<double> gates;  // rnn: len x (G H) post-activation gate values
  std::vector<double> rep;    // pre-head representation
  std::vector<double> drop;   // dropout multipliers; empty when inactive
  double logit = 0.0;
};

void check_shapes(const SeqModelParams& params) {
  const auto ref = make_params(params.family, params.hidden_dim);
  if (ref.tensors.size() != params.tensors.size()) {
    throw Error(ErrorCode::kShapeMismatch, "wrong tensor count for family");
  }
  for (std::size_t i = 0; i < ref.tensors.size(); ++i) {
    const auto& a = ref.tensors[i];
    const auto& b = params.tensors[i];
    if (a.name != b.name || a.shape != b.shape || a.data.size() != b.data.size()) {
      throw Error(ErrorCode::kShapeMismatch, "tensor '" + b.name + "' does not match family " +
                                                 std::string(to_string(params.family)));
    }
  }
}

void check_batch(const PaddedBatch& batch) {
  if (batch.data.size() != batch.batch * batch.max_len * D ||
      batch.mask.size() != batch.batch * batch.max_len || batch.labels.size() != batch.batch ||
      batch.lengths.size() != batch.batch) {
    throw Error(ErrorCode::kShapeMismatch, "inconsistent batch buffers");
  }
}

void run_sequence(const SeqModelParams& p, const Layout& l, const PaddedBatch& batch,
                  std::size_t b, SeqCache& cache) {
  const std::size_t H = p.hidden_dim;
  const std::size_t len = batch.lengths[b];
  cache.len = len;
  cache.x.assign(len * D, 0.0);
  for (std::size_t t = 0; t < len; ++t) {
    const double* raw = batch.step(b, t);
    for (std::size_t k = 0; k < D; ++k) {
      cache.x[t * D + k] = (raw[k] - p.input_mean[k]) / p.input_scale[k];
    }
  }
  cache.rep.assign(H, 0.0);
  const auto& w_in = p.tensors[l.w_in].data;
  const auto& b_in = p.tensors[l.b_in].data;

  if (p.family == SeqFamily::kNn) {
    cache.pre.assign(len * H, 0.0);
    for (std::size_t t = 0; t < len; ++t) {
      double* a = cache.pre.data() + t * H;
      std::copy(b_in.begin(), b_in.end(), a);
      matvec_add(w_in, D, 0, H, cache.x.data() + t * D, a);
      for (std::size_t k = 0; k < H; ++k) cache.rep[k] += std::max(a[k], 0.0);
    }
    const double inv = 1.0 / static_cast<double>(len);
    for (auto& v : cache.rep) v *= inv;
    return;
  }

  const auto& w_hh = p.tensors[l.w_hh].data;
  const std::size_t G = gate_count(p.family);
  cache.h.assign((len + 1) * H, 0.0);
  cache.gates.assign(len * G * H, 0.0);
  if (p.family == SeqFamily::kLstm) cache.c.assign((len + 1) * H, 0.0);
  std::vector<double> a(G * H);
  std::vector<double> rh(H);

  for (std::size_t t = 0; t < len; ++t) {
    const double* x = cache.x.data() + t * D;
    const double* hp = cache.h.data() + t * H;
    double* hn = cache.h.data() + (t + 1) * H;
    double* g = cache.gates.data() + t * G * H;
    std::copy(b_in.begin(), b_in.end(), a.begin());
    matvec_add(w_in, D, 0, G * H, x, a.data());

    if (p.family == SeqFamily::kGru) {
      matvec_add(w_hh, H, 0, 2 * H, hp, a.data());
      for (std::size_t k = 0; k < 2 * H; ++k) g[k] = sigm(a[k]);
      for (std::size_t k = 0; k < H; ++k) rh[k] = g[H + k] * hp[k];
      matvec_add(w_hh, H, 2 * H, H, rh.data(), a.data() + 2 * H);
      for (std::size_t k = 0; k < H; ++k) {
        const double z = g[k];
        const double n = std::tanh(a[2 * H + k]);
        g[2 * H + k] = n;
        hn[k] = (1.0 - z) * hp[k] + z * n;
      }
    } else {
      matvec_add(w_hh, H, 0, 4 * H, hp, a.data());
      const double* cp = cache.c.data() + t * H;
      double* cn = cache.c.data() + (t + 1) * H;
      for (std::size_t k = 0; k < H; ++k) {
        const double i = sigm(a[k]);
        const double f = sigm(a[H + k]);
        const double gg = std::tanh(a[2 * H + k]);
        const double o = sigm(a[3 * H + k]);
        g[k] = i;
        g[H + k] = f;
        g[2 * H + k] = gg;
        g[3 * H + k] = o;
        cn[k] = f * cp[k] + i * gg;
        hn[k] = o * std::tanh(cn[k]);
      }
    }
  }
  std::copy(cache.h.begin() + static_cast<std::ptrdiff_t>(len * H), cache.h.end(),
            cache.rep.begin());
}

double head(const SeqModelParams& p, const Layout& l, SeqCache& cache) {
  const auto& w = p.tensors[l.w_out].data;
  double z = p.tensors[l.b_out].data[0];
  for (std::size_t k = 0; k < p.hidden_dim; ++k) {
    const double m = cache.drop.empty() ? 1.0 : cache.drop[k];
    z += w[k] * cache.rep[k] * m;
  }
  cache.logit = z;
  return z;
}

void draw_dropout(std::size_t H, double rate, Rng& rng, std::vector<double>& out) {
  out.assign(H, 0.0);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t k = 0; k < H; ++k) out[k] = rng.uniform() >= rate ? keep_scale : 0.0;
}

void backprop_sequence(const SeqModelParams& p, const Layout& l, const SeqCache& cache,
                       double dlogit, std::vector<std::vector<double>>& grads) {
  const std::size_t H = p.hidden_dim;
  const std::size_t len = cache.len;
  const auto& w_out = p.tensors[l.w_out].data;

  grads[l.b_out][0] += dlogit;
  std::vector<double> drep(H);
  for (std::size_t k = 0; k < H; ++k) {
    const double m = cache.drop.empty() ? 1.0 : cache.drop[k];
    grads[l.w_out][k] += dlogit * cache.rep[k] * m;
    drep[k] = dlogit * w_out[k] * m;
  }

  auto& gw_in = grads[l.w_in];
  auto& gb_in = grads[l.b_in];

  if (p.family == SeqFamily::kNn) {
    const double inv = 1.0 / static_cast<double>(len);
    std::vector<double> da(H);
    for (std::size_t t = 0; t < len; ++t) {
      const double* a = cache.pre.data() + t * H;
      for (std::size_t k = 0; k < H; ++k) da[k] = a[k] > 0.0 ? drep[k] * inv : 0.0;
      outer_add(gw_in, D, 0, H, da.data(), cache.x.data() + t * D);
      for (std::size_t k = 0; k < H; ++k) gb_in[k] += da[k];
    }
    return;
  }

  const auto& w_hh = p.tensors[l.w_hh].data;
  auto& gw_hh = grads[l.w_hh];
  const std::size_t G = gate_count(p.family);
  std::vector<double> dh = drep;
  std::vector<double> dh_prev(H);
  std::vector<double> da(G * H);
  std::vector<double> dc(H, 0.0);
  std::vector<double> rh(H);
  std::vector<double> drh(H);

  for (std::size_t t = len; t-- > 0;) {
    const double* x = cache.x.data() + t * D;
    const double* hp = cache.h.data() + t * H;
    const double* g = cache.gates.data() + t * G * H;
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);

    if (p.family == SeqFamily::kGru) {
      for (std::size_t k = 0; k < H; ++k) {
        const double z = g[k];
        const double n = g[2 * H + k];
        da[2 * H + k] = dh[k] * z * (1.0 - n * n);
        da[k] = dh[k] * (n - hp[k]) * z * (1.0 - z);
        dh_prev[k] = dh[k] * (1.0 - z);
        rh[k] = g[H + k] * hp[k];
      }
      outer_add(gw_hh, H, 2 * H, H, da.data() + 2 * H, rh.data());
      std::fill(drh.begin(), drh.end(), 0.0);
      matvec_t_add(w_hh, H, 2 * H, H, da.data() + 2 * H, drh.data());
      for (std::size_t k = 0; k < H; ++k) {
        const double r = g[H + k];
        dh_prev[k] += drh[k] * r;
        da[H + k] = drh[k] * hp[k] * r * (1.0 - r);
      }
      outer_add(gw_hh, H, 0, 2 * H, da.data(), hp);
      matvec_t_add(w_hh, H, 0, 2 * H, da.data(), dh_prev.data());
    } else {
      const double* cp = cache.c.data() + t * H;
      const double* cn = cache.c.data() + (t + 1) * H;
      for (std::size_t k = 0; k < H; ++k) {
        const double i = g[k];
        const double f = g[H + k];
        const double gg = g[2 * H + k];
        const double o = g[3 * H + k];
        const double tc = std::tanh(cn[k]);
        const double dck = dc[k] + dh[k] * o * (1.0 - tc * tc);
        da[k] = dck * gg * i * (1.0 - i);
        da[H + k] = dck * cp[k] * f * (1.0 - f);
        da[2 * H + k] = dck * i * (1.0 - gg * gg);
        da[3 * H + k] = dh[k] * tc * o * (1.0 - o);
        dc[k] = dck * f;
      }
      outer_add(gw_hh, H, 0, 4 * H, da.data(), hp);
      matvec_t_add(w_hh, H, 0, 4 * H, da.data(), dh_prev.data());
    }
    outer_add(gw_in, D, 0, G * H, da.data(), x);
    for (std::size_t k = 0; k < G * H; ++k) gb_in[k] += da[k];
    dh.swap(dh_prev);
  }
}

std::vector<MetricSequence> truncated(std::span<const MetricSequence> seqs) {
  std::vector<MetricSequence> out(seqs.begin(), seqs.end());
  for (auto& s : out) {
    if (s.rows.size() > kMaxSequenceLength) {
      s.rows.erase(s.rows.begin(),
                   s.rows.end() - static_cast<std::ptrdiff_t>(kMaxSequenceLength));
    }
  }
  return out;
}

struct Adam {
  std::vector<std::vector<double>> m, v;
  long t = 0;

  explicit Adam(const SeqModelParams& p) {
    for (const auto& tensor : p.tensors) {
      m.emplace_back(tensor.data.size(), 0.0);
      v.emplace_back(tensor.data.size(), 0.0);
    }
  }

  void step(SeqModelParams& p, const std::vector<std::vector<double>>& grads, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    for (std::size_t i = 0; i < p.tensors.size(); ++i) {
      auto& w = p.tensors[i].data;
      for (std::size_t k = 0; k < w.size(); ++k) {
        const double g = grads[i][k];
        m[i][k] = b1 * m[i][k] + (1.0 - b1) * g;
        v[i][k] = b2 * v[i][k] + (1.0 - b2) * g * g;
        w[k] -= lr * (m[i][k] / c1) / (std::sqrt(v[i][k] / c2) + eps);
      }
    }
  }
};

}  // namespace

MetricSequence to_sequence(const QuantifiedChain& chain) {
  MetricSequence s;
  s.meta = chain.meta;
  s.label = chain.meta.correct;
  for (const auto& r : chain.rows) {
    s.rows.push_back({r.kl, r.js, r.hellinger, r.cosine, r.entropy_diff});
  }
  return s;
}

PaddedBatch pad_batch(std::span<const MetricSequence> seqs) {
  if (seqs.empty()) throw Error(ErrorCode::kEmptyBatch, "cannot pad an empty batch");
  PaddedBatch out;
  out.batch = seqs.size();
  for (const auto& s : seqs) {
    if (s.rows.empty()) {
      throw Error(ErrorCode::kEmptySequence, "sequence '" + s.meta.question_id + "' has no rows");
    }
    out.max_len = std::max(out.max_len, s.rows.size());
  }
  out.data.assign(out.batch * out.max_len * D, 0.0);
  out.mask.assign(out.batch * out.max_len, 0);
  for (std::size_t b = 0; b < seqs.size(); ++b) {
    const auto& s = seqs[b];
    for (std::size_t t = 0; t < s.rows.size(); ++t) {
      for (std::size_t k = 0; k < D; ++k) {
        if (!std::isfinite(s.rows[t][k])) {
          throw Error(ErrorCode::kNonFiniteFeature,
                      "sequence '" + s.meta.question_id + "' has a non-finite value");
        }
        out.data[(b * out.max_len + t) * D + k] = s.rows[t][k];
      }
      out.mask[b * out.max_len + t] = 1;
    }
    out.labels.push_back(s.label ? 1 : 0);
    out.lengths.push_back(s.rows.size());
  }
  return out;
}

std::string_view to_string(SeqFamily family) {
  switch (family) {
    case SeqFamily::kNn: return "nn";
    case SeqFamily::kGru: return "gru";
    case SeqFamily::kLstm: return "lstm";
  }
  return "nn";
}

SeqFamily seq_family_from_string(std::string_view name) {
  if (name == "nn") return SeqFamily::kNn;
  if (name == "gru") return SeqFamily::kGru;
  if (name == "lstm") return SeqFamily::kLstm;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown sequence model '" + std::string(name) + "' (valid: nn, gru, lstm)");
}

Tensor& SeqModelParams::get(std::string_view name) {
  for (auto& t : tensors) {
    if (t.name == name) return t;
  }
  throw Error(ErrorCode::kShapeMismatch, "no tensor named '" + std::string(name) + "'");
}

const Tensor& SeqModelParams::get(std::string_view name) const {
  return const_cast<SeqModelParams*>(this)->get(name);
}

std::size_t SeqModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.data.size();
  return n;
}

SeqModelParams make_params(SeqFamily family, std::size_t hidden_dim) {
  if (hidden_dim == 0) throw Error(ErrorCode::kInvalidArgument, "hidden_dim must be positive");
  const std::size_t H = hidden_dim;
  SeqModelParams p;
  p.family = family;
  p.hidden_dim = H;
  auto add = [&](std::string name, std::vector<std::size_t> shape, bool bias, std::size_t fan_in) {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    p.tensors.push_back(Tensor{std::move(name), std::move(shape), std::vector<double>(n, 0.0),
                               bias, fan_in});
  };
  if (family == SeqFamily::kNn) {
    add("w_in", {H, D}, false, D);
    add("b_in", {H}, true, D);
  } else {
    const std::size_t G = gate_count(family);
    add("w_ih", {G * H, D}, false, D);
    add("w_hh", {G * H, H}, false, H);
    add("b", {G * H}, true, H);
  }
  add("w_out", {H}, false, H);
  add("b_out", {1}, true, H);
  return p;
}

SeqModelParams init_params(SeqFamily family, std::size_t hidden_dim, std::uint64_t seed) {
  auto p = make_params(family, hidden_dim);
  Rng rng(seed);
  for (auto& t : p.tensors) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(t.fan_in));
    for (auto& v : t.data) v = rng.uniform(-bound, bound);
  }
  return p;
}

std::vector<double> forward(const SeqModelParams& params, const PaddedBatch& batch,
                            bool train_mode, double dropout, Rng& rng) {
  check_shapes(params);
  check_batch(batch);
  const Layout l = layout_of(params);
  const bool use_dropout = train_mode && dropout > 0.0;
  std::vector<double> out(batch.batch);
  SeqCache cache;
  for (std::size_t b = 0; b < batch.batch; ++b) {
    run_sequence(params, l, batch, b, cache);
    if (use_dropout) draw_dropout(params.hidden_dim, dropout, rng, cache.drop);
    else cache.drop.clear();
    out[b] = sigm(head(params, l, cache));
  }
  return out;
}

LossAndGrad loss_and_gradients(const SeqModelParams& params, const PaddedBatch& batch,
                               const TrainConfig& cfg, Rng& rng) {
  check_shapes(params);
  check_batch(batch);
  const Layout l = layout_of(params);
  const bool use_dropout = cfg.dropout > 0.0;
  LossAndGrad out;
  for (const auto& t : params.tensors) out.grads.emplace_back(t.data.size(), 0.0);

  const double inv_b = 1.0 / static_cast<double>(batch.batch);
  double loss = 0.0;
  SeqCache cache;
  for (std::size_t b = 0; b < batch.batch; ++b) {
    run_sequence(params, l, batch, b, cache);
    if (use_dropout) draw_dropout(params.hidden_dim, cfg.dropout, rng, cache.drop);
    else cache.drop.clear();
    const double z = head(params, l, cache);
    const double y = batch.labels[b] != 0 ? 1.0 : 0.0;
    loss += softplus(z) - y * z;
    backprop_sequence(params, l, cache, (sigm(z) - y) * inv_b, out.grads);
  }
  loss *= inv_b;

  if (cfg.l2 > 0.0) {
    for (std::size_t i = 0; i < params.tensors.size(); ++i) {
      const auto& t = params.tensors[i];
      if (t.is_bias) continue;
      for (std::size_t k = 0; k < t.data.size(); ++k) {
        loss += cfg.l2 * t.data[k] * t.data[k];
        out.grads[i][k] += 2.0 * cfg.l2 * t.data[k];
      }
    }
  }
  if (!std::isfinite(loss)) throw Error(ErrorCode::kNonFiniteLoss, "training loss diverged");
  out.loss = loss;
  return out;
}

std::vector<double> predict_sequences(const SeqModelParams& params,
                                      std::span<const MetricSequence> seqs) {
  const auto trimmed = truncated(seqs);
  std::vector<double> out;
  out.reserve(trimmed.size());
  Rng unused(0);
  constexpr std::size_t kChunk = 32;
  for (std::size_t i = 0; i < trimmed.size(); i += kChunk) {
    const std::size_t n = std::min(kChunk, trimmed.size() - i);
    const auto batch = pad_batch(std::span<const MetricSequence>(trimmed).subspan(i, n));
    const auto probs = forward(params, batch, false, 0.0, unused);
    out.insert(out.end(), probs.begin(), probs.end());
  }
  return out;
}

SeqFitResult fit_sequential(std::span<const MetricSequence> train,
                            std::span<const MetricSequence> val, SeqFamily family,
                            const TrainConfig& cfg) {
  const auto positives = std::count_if(train.begin(), train.end(),
                                       [](const MetricSequence& s) { return s.label; });
  if (positives == 0 || static_cast<std::size_t>(positives) == train.size()) {
    throw Error(ErrorCode::kSingleClassTraining, "training sequences contain one class");
  }
  if (val.empty()) throw Error(ErrorCode::kInvalidArgument, "validation set is empty");
  if (!(cfg.learning_rate > 0.0) || cfg.l2 < 0.0 || cfg.dropout < 0.0 || cfg.dropout >= 1.0 ||
      cfg.batch_size == 0 || cfg.max_epochs < 1 || cfg.patience < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid training configuration");
  }

  const auto train_seqs = truncated(train);
  const auto val_seqs = truncated(val);

  SeqFitResult result;
  result.config = cfg;
  auto params = init_params(family, cfg.hidden_dim, cfg.seed);

  // Channel statistics over every training step.
  std::size_t count = 0;
  MetricRow sum{}, sq{};
  for (const auto& s : train_seqs) {
    for (const auto& r : s.rows) {
      for (std::size_t k = 0; k < D; ++k) sum[k] += r[k];
      ++count;
    }
  }
  for (std::size_t k = 0; k < D; ++k) params.input_mean[k] = sum[k] / static_cast<double>(count);
  for (const auto& s : train_seqs) {
    for (const auto& r : s.rows) {
      for (std::size_t k = 0; k < D; ++k) {
        const double d = r[k] - params.input_mean[k];
        sq[k] += d * d;
      }
    }
  }
  for (std::size_t k = 0; k < D; ++k) {
    const double sd = std::sqrt(sq[k] / static_cast<double>(count));
    params.input_scale[k] = sd > 1e-12 * std::max(1.0, std::abs(params.input_mean[k])) ? sd : 1.0;
  }

  std::vector<int> val_labels;
  for (const auto& s : val_seqs) val_labels.push_back(s.label ? 1 : 0);

  Adam adam(params);
  Rng rng(derive_seed(cfg.seed, 1));
  std::vector<std::size_t> order(train_seqs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<MetricSequence> chunk;
  double best_f1 = -1.0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t i = 0; i < order.size(); i += cfg.batch_size) {
      chunk.clear();
      for (std::size_t j = i; j < std::min(order.size(), i + cfg.batch_size); ++j) {
        chunk.push_back(train_seqs[order[j]]);
      }
      const auto batch = pad_batch(chunk);
      const auto lg = loss_and_gradients(params, batch, cfg, rng);
      adam.step(params, lg.grads, cfg.learning_rate);
      loss_sum += lg.loss;
      ++batches;
    }

    const auto probs = predict_sequences(params, val_seqs);
    std::vector<int> preds;
    for (double p : probs) preds.push_back(p > 0.5 ? 1 : 0);
    const double vf1 = f1(val_labels, preds);
    result.log.push_back({epoch, loss_sum / static_cast<double>(batches), vf1});

    if (vf1 > best_f1) {
      best_f1 = vf1;
      result.best_epoch = epoch;
      result.params = params;
    }
    if (epoch - result.best_epoch >= cfg.patience) break;
  }
  return result;
}

}  // namespace eqr
