#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "eqr/classical_models.hpp"
#include "eqr/error.hpp"
#include "eqr/features.hpp"
#include "eqr/metrics.hpp"
#include "eqr/reasoning_dynamics.hpp"
#include "eqr/sequential_models.hpp"
#include "json.hpp"

namespace eqr {

enum class ModelFamily { kLr, kSvm, kGbt, kNn, kGru, kLstm };
std::string_view to_string(ModelFamily family);
ModelFamily model_family_from_string(std::string_view name);
bool is_sequential(ModelFamily family);

struct ModelConfig {
  ModelFamily family = ModelFamily::kLr;
  LRConfig lr;
  SVMConfig svm;
  GBTConfig gbt;
  TrainConfig seq;
};

// Only the fields used by the family are written. Keys mirror the struct
// member names (c, kernel, gamma, learning_rate, n_estimators, l2, ...).
nlohmann::json config_to_json(const ModelConfig& cfg);
ModelConfig config_from_json(const nlohmann::json& j);
// Throws kInvalidArgument for keys the family does not have.
void apply_param(ModelConfig& cfg, const std::string& key, const nlohmann::json& value);

// Rows for both model kinds. `sequences` is empty when built from a feature
// table, which only classical families can use.
struct LabeledData {
  std::vector<std::string> ids;
  Labels labels;
  FeatureMatrix features;
  std::vector<MetricSequence> sequences;

  std::size_t size() const { return labels.size(); }
};

LabeledData data_from_quantified(std::span<const QuantifiedChain> chains);
LabeledData data_from_features(std::span<const FeatureRow> rows);

using FittedModel = std::variant<LRModel, SVMModel, GBTModel, SeqFitResult>;

ModelFamily family_of(const FittedModel& model);

// Sequential families carve a validation split (a quarter of `train`,
// stratified, seeded by cfg.seq.seed) off the training rows for early stopping.
FittedModel fit_model(const ModelConfig& cfg, const LabeledData& data,
                      std::span<const std::size_t> train);

struct Scored {
  std::vector<double> scores;
  std::vector<int> predictions;
};

Scored score_model(const FittedModel& model, const LabeledData& data,
                   std::span<const std::size_t> rows);
EvalReport evaluate_model(const FittedModel& model, const LabeledData& data,
                          std::span<const std::size_t> rows);

enum class SearchMethod { kGrid, kRandom };
std::string_view to_string(SearchMethod method);
SearchMethod search_method_from_string(std::string_view name);

struct SearchSpace {
  ModelConfig base;
  std::vector<std::pair<std::string, std::vector<nlohmann::json>>> params;
};

// Candidate grids built from the reported best configurations.
SearchSpace default_space(ModelFamily family);
// {"family": ..., "base": {...}, "params": {"c": [0.1, 1], ...}}
SearchSpace space_from_json(const nlohmann::json& j);

// Grid: the full Cartesian product, last parameter varying fastest. Random:
// n_iter independent draws from the per-parameter choice lists.
std::vector<ModelConfig> expand(const SearchSpace& space, SearchMethod method,
                                std::size_t n_iter, std::uint64_t seed);

struct Trial {
  ModelConfig config;
  bool ok = false;
  EvalReport report;
  ErrorCode error_code = ErrorCode::kInvalidArgument;
  std::string error;
};

struct SearchResult {
  std::vector<Trial> trials;
  std::size_t best = 0;
};

// Fits every candidate on an inner stratified split of `train` and keeps the
// highest validation F1 (ties: higher ROC-AUC, then earlier candidate). Fitter
// errors are recorded per trial; if every trial fails the first error is
// rethrown.
SearchResult search(std::span<const ModelConfig> candidates, const LabeledData& data,
                    std::span<const std::size_t> train, const SplitSpec& inner);

nlohmann::json report_to_json(const EvalReport& report);

// Self-describing model documents.
nlohmann::json model_to_json(const FittedModel& model, const ModelConfig& cfg);
std::pair<FittedModel, ModelConfig> model_from_json(const nlohmann::json& j);

}  // namespace eqr
