#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqr/reasoning_dynamics.hpp"
#include "eqr/rng.hpp"
#include "eqr/trace_model.hpp"

namespace eqr {

inline constexpr std::size_t kSeqChannels = 5;
inline constexpr std::size_t kMaxSequenceLength = 512;

using MetricRow = std::array<double, kSeqChannels>;

struct MetricSequence {
  std::vector<MetricRow> rows;  // kl, js, hellinger, cosine, entropy_diff
  bool label = false;
  ChainMeta meta;
};

MetricSequence to_sequence(const QuantifiedChain& chain);

struct PaddedBatch {
  std::size_t batch = 0;
  std::size_t max_len = 0;
  std::vector<double> data;           // batch x max_len x 5, zero at padded positions
  std::vector<std::uint8_t> mask;     // batch x max_len, 1 = real step
  std::vector<int> labels;
  std::vector<std::size_t> lengths;

  const double* step(std::size_t b, std::size_t t) const {
    return data.data() + (b * max_len + t) * kSeqChannels;
  }
};

// Throws kEmptyBatch.
PaddedBatch pad_batch(std::span<const MetricSequence> seqs);

enum class SeqFamily { kNn, kGru, kLstm };
std::string_view to_string(SeqFamily family);
SeqFamily seq_family_from_string(std::string_view name);

struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> data;
  bool is_bias = false;
  std::size_t fan_in = 1;
};

// Tensor layout per family (H = hidden_dim, D = 5):
//   nn:   w_in [H,D], b_in [H]
//   gru:  w_ih [3H,D], w_hh [3H,H], b [3H]   gate rows ordered z, r, n
//   lstm: w_ih [4H,D], w_hh [4H,H], b [4H]   gate rows ordered i, f, g, o
//   all:  w_out [H], b_out [1]
struct SeqModelParams {
  SeqFamily family = SeqFamily::kNn;
  std::size_t hidden_dim = 64;
  std::vector<Tensor> tensors;
  // Channel standardization applied inside forward; identity by default.
  MetricRow input_mean{};
  MetricRow input_scale{1.0, 1.0, 1.0, 1.0, 1.0};

  Tensor& get(std::string_view name);
  const Tensor& get(std::string_view name) const;
  std::size_t parameter_count() const;
};

// Zero-valued tensors with the family's shapes.
SeqModelParams make_params(SeqFamily family, std::size_t hidden_dim);
// Uniform in +-1/sqrt(fan_in) per tensor.
SeqModelParams init_params(SeqFamily family, std::size_t hidden_dim, std::uint64_t seed);

struct TrainConfig {
  double learning_rate = 1e-3;
  double l2 = 0.0;
  double dropout = 0.0;
  std::size_t batch_size = 32;
  int max_epochs = 100;
  int patience = 50;
  std::uint64_t seed = 0;
  std::size_t hidden_dim = 64;
};

// Per-sequence probabilities. The rng is only drawn from when train_mode is on
// and dropout > 0. Throws kShapeMismatch.
std::vector<double> forward(const SeqModelParams& params, const PaddedBatch& batch,
                            bool train_mode, double dropout, Rng& rng);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<std::vector<double>> grads;  // parallel to params.tensors
};

// Mean binary cross-entropy plus l2 * sum of squared non-bias weights, with
// the forward pass in train mode. Throws kNonFiniteLoss.
LossAndGrad loss_and_gradients(const SeqModelParams& params, const PaddedBatch& batch,
                               const TrainConfig& cfg, Rng& rng);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;  // mean over mini-batches
  double val_f1 = 0.0;
};

struct SeqFitResult {
  SeqModelParams params;  // best-validation-F1 parameters
  TrainConfig config;
  std::vector<EpochLog> log;
  int best_epoch = 0;
};

// Throws kSingleClassTraining, kNonFiniteLoss, kInvalidArgument (empty val).
SeqFitResult fit_sequential(std::span<const MetricSequence> train,
                            std::span<const MetricSequence> val, SeqFamily family,
                            const TrainConfig& cfg);

// Eval-mode probabilities, batched internally.
std::vector<double> predict_sequences(const SeqModelParams& params,
                                      std::span<const MetricSequence> seqs);

}  // namespace eqr
