#include "eqr/model_selection.hpp"

#include <algorithm>
#include <numeric>

namespace eqr {

using nlohmann::json;

namespace {

[[noreturn]] void bad_key(ModelFamily family, const std::string& key) {
  throw Error(ErrorCode::kInvalidArgument, "parameter '" + key + "' does not apply to " +
                                               std::string(to_string(family)));
}

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "parameter '" + key + "' has the wrong type");
  }
}

json standardizer_to_json(const Standardizer& s) {
  return json{{"mean", s.mean}, {"scale", s.scale}};
}

Standardizer standardizer_from_json(const json& j) {
  Standardizer s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.scale = j.at("scale").get<std::vector<double>>();
  if (s.mean.size() != s.scale.size()) {
    throw Error(ErrorCode::kFormat, "standardizer mean/scale lengths differ");
  }
  return s;
}

json tree_node_to_json(const RegressionTree& tree, int index) {
  const auto& n = tree.nodes[static_cast<std::size_t>(index)];
  if (n.feature < 0) return json{{"value", n.value}};
  return json{{"feature", n.feature},
              {"threshold", n.threshold},
              {"left", tree_node_to_json(tree, n.left)},
              {"right", tree_node_to_json(tree, n.right)}};
}

int tree_node_from_json(const json& j, RegressionTree& tree) {
  const int index = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (!j.contains("feature")) {
    tree.nodes[static_cast<std::size_t>(index)].value = j.at("value").get<double>();
    return index;
  }
  TreeNode node;
  node.feature = j.at("feature").get<int>();
  node.threshold = j.at("threshold").get<double>();
  node.left = tree_node_from_json(j.at("left"), tree);
  node.right = tree_node_from_json(j.at("right"), tree);
  tree.nodes[static_cast<std::size_t>(index)] = node;
  return index;
}

std::vector<int> labels_at(const LabeledData& data, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto i : rows) out.push_back(data.labels[i]);
  return out;
}

std::vector<MetricSequence> sequences_at(const LabeledData& data,
                                         std::span<const std::size_t> rows) {
  if (data.sequences.size() != data.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "sequential models need per-step metric rows (a quantified file)");
  }
  std::vector<MetricSequence> out;
  out.reserve(rows.size());
  for (auto i : rows) out.push_back(data.sequences[i]);
  return out;
}

bool better(const EvalReport& a, const EvalReport& b) {
  if (a.f1 != b.f1) return a.f1 > b.f1;
  return a.roc_auc > b.roc_auc;
}

}  // namespace

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::kLr: return "lr";
    case ModelFamily::kSvm: return "svm";
    case ModelFamily::kGbt: return "gbt";
    case ModelFamily::kNn: return "nn";
    case ModelFamily::kGru: return "gru";
    case ModelFamily::kLstm: return "lstm";
  }
  return "lr";
}

ModelFamily model_family_from_string(std::string_view name) {
  for (auto f : {ModelFamily::kLr, ModelFamily::kSvm, ModelFamily::kGbt, ModelFamily::kNn,
                 ModelFamily::kGru, ModelFamily::kLstm}) {
    if (name == to_string(f)) return f;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown model family '" + std::string(name) +
                                               "' (valid: lr, svm, gbt, nn, gru, lstm)");
}

bool is_sequential(ModelFamily family) {
  return family == ModelFamily::kNn || family == ModelFamily::kGru ||
         family == ModelFamily::kLstm;
}

json config_to_json(const ModelConfig& cfg) {
  json j = json::object();
  j["family"] = to_string(cfg.family);
  switch (cfg.family) {
    case ModelFamily::kLr:
      j["c"] = cfg.lr.c;
      j["max_iter"] = cfg.lr.max_iter;
      j["tol"] = cfg.lr.tol;
      break;
    case ModelFamily::kSvm:
      j["kernel"] = to_string(cfg.svm.kernel);
      j["c"] = cfg.svm.c;
      j["gamma"] = cfg.svm.gamma;
      j["degree"] = cfg.svm.degree;
      j["tol"] = cfg.svm.tol;
      j["max_iter"] = cfg.svm.max_iter;
      break;
    case ModelFamily::kGbt:
      j["learning_rate"] = cfg.gbt.learning_rate;
      j["n_estimators"] = cfg.gbt.n_estimators;
      j["max_depth"] = cfg.gbt.max_depth;
      j["lambda"] = cfg.gbt.lambda;
      j["min_child_weight"] = cfg.gbt.min_child_weight;
      break;
    default:
      j["learning_rate"] = cfg.seq.learning_rate;
      j["l2"] = cfg.seq.l2;
      j["dropout"] = cfg.seq.dropout;
      j["hidden_dim"] = cfg.seq.hidden_dim;
      j["batch_size"] = cfg.seq.batch_size;
      j["max_epochs"] = cfg.seq.max_epochs;
      j["patience"] = cfg.seq.patience;
      j["seed"] = cfg.seq.seed;
      break;
  }
  return j;
}

void apply_param(ModelConfig& cfg, const std::string& key, const json& v) {
  if (key == "family") return;
  switch (cfg.family) {
    case ModelFamily::kLr:
      if (key == "c") cfg.lr.c = get_as<double>(v, key);
      else if (key == "max_iter") cfg.lr.max_iter = get_as<int>(v, key);
      else if (key == "tol") cfg.lr.tol = get_as<double>(v, key);
      else bad_key(cfg.family, key);
      break;
    case ModelFamily::kSvm:
      if (key == "kernel") cfg.svm.kernel = kernel_from_string(get_as<std::string>(v, key));
      else if (key == "c") cfg.svm.c = get_as<double>(v, key);
      else if (key == "gamma") cfg.svm.gamma = get_as<double>(v, key);
      else if (key == "degree") cfg.svm.degree = get_as<int>(v, key);
      else if (key == "tol") cfg.svm.tol = get_as<double>(v, key);
      else if (key == "max_iter") cfg.svm.max_iter = get_as<long>(v, key);
      else bad_key(cfg.family, key);
      break;
    case ModelFamily::kGbt:
      if (key == "learning_rate") cfg.gbt.learning_rate = get_as<double>(v, key);
      else if (key == "n_estimators") cfg.gbt.n_estimators = get_as<int>(v, key);
      else if (key == "max_depth") cfg.gbt.max_depth = get_as<int>(v, key);
      else if (key == "lambda") cfg.gbt.lambda = get_as<double>(v, key);
      else if (key == "min_child_weight") cfg.gbt.min_child_weight = get_as<double>(v, key);
      else bad_key(cfg.family, key);
      break;
    default:
      if (key == "learning_rate") cfg.seq.learning_rate = get_as<double>(v, key);
      else if (key == "l2") cfg.seq.l2 = get_as<double>(v, key);
      else if (key == "dropout") cfg.seq.dropout = get_as<double>(v, key);
      else if (key == "hidden_dim") cfg.seq.hidden_dim = get_as<std::size_t>(v, key);
      else if (key == "batch_size") cfg.seq.batch_size = get_as<std::size_t>(v, key);
      else if (key == "max_epochs") cfg.seq.max_epochs = get_as<int>(v, key);
      else if (key == "patience") cfg.seq.patience = get_as<int>(v, key);
      else if (key == "seed") cfg.seq.seed = get_as<std::uint64_t>(v, key);
      else bad_key(cfg.family, key);
      break;
  }
}

ModelConfig config_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family")) {
    throw Error(ErrorCode::kInvalidArgument, "model config needs a 'family' field");
  }
  ModelConfig cfg;
  cfg.family = model_family_from_string(get_as<std::string>(j.at("family"), "family"));
  for (const auto& [key, value] : j.items()) apply_param(cfg, key, value);
  return cfg;
}

LabeledData data_from_quantified(std::span<const QuantifiedChain> chains) {
  LabeledData d;
  d.features = FeatureMatrix(0, kFeatureCount);
  for (const auto& q : chains) {
    d.ids.push_back(q.meta.question_id);
    d.labels.push_back(q.meta.correct ? 1 : 0);
    const auto f = extract_features(q);
    d.features.push_row(f);
    d.sequences.push_back(to_sequence(q));
  }
  return d;
}

LabeledData data_from_features(std::span<const FeatureRow> rows) {
  LabeledData d;
  d.features = FeatureMatrix(0, kFeatureCount);
  for (const auto& r : rows) {
    d.ids.push_back(r.question_id);
    d.labels.push_back(r.correct ? 1 : 0);
    d.features.push_row(r.features);
  }
  return d;
}

ModelFamily family_of(const FittedModel& model) {
  switch (model.index()) {
    case 0: return ModelFamily::kLr;
    case 1: return ModelFamily::kSvm;
    case 2: return ModelFamily::kGbt;
    default: {
      switch (std::get<SeqFitResult>(model).params.family) {
        case SeqFamily::kNn: return ModelFamily::kNn;
        case SeqFamily::kGru: return ModelFamily::kGru;
        case SeqFamily::kLstm: return ModelFamily::kLstm;
      }
    }
  }
  return ModelFamily::kLr;
}

FittedModel fit_model(const ModelConfig& cfg, const LabeledData& data,
                      std::span<const std::size_t> train) {
  if (train.empty()) throw Error(ErrorCode::kSingleClassTraining, "no training rows");
  if (!is_sequential(cfg.family)) {
    const auto x = data.features.select(train);
    const auto y = labels_at(data, train);
    switch (cfg.family) {
      case ModelFamily::kLr: return fit_lr(x, y, cfg.lr);
      case ModelFamily::kSvm: return fit_svm(x, y, cfg.svm);
      default: return fit_gbt(x, y, cfg.gbt);
    }
  }
  const auto y = labels_at(data, train);
  if (std::all_of(y.begin(), y.end(), [&](int v) { return v == y.front(); })) {
    throw Error(ErrorCode::kSingleClassTraining, "training rows contain one class");
  }
  const auto inner = stratified_split(y, SplitSpec{0.25, cfg.seq.seed});
  std::vector<std::size_t> fit_rows, val_rows;
  for (auto i : inner.train) fit_rows.push_back(train[i]);
  for (auto i : inner.test) val_rows.push_back(train[i]);
  const auto fit_seqs = sequences_at(data, fit_rows);
  const auto val_seqs = sequences_at(data, val_rows);
  const SeqFamily fam = cfg.family == ModelFamily::kNn    ? SeqFamily::kNn
                        : cfg.family == ModelFamily::kGru ? SeqFamily::kGru
                                                          : SeqFamily::kLstm;
  return fit_sequential(fit_seqs, val_seqs, fam, cfg.seq);
}

Scored score_model(const FittedModel& model, const LabeledData& data,
                   std::span<const std::size_t> rows) {
  Scored out;
  if (const auto* seq = std::get_if<SeqFitResult>(&model)) {
    out.scores = predict_sequences(seq->params, sequences_at(data, rows));
    for (double p : out.scores) out.predictions.push_back(p > 0.5 ? 1 : 0);
    return out;
  }
  const ClassicalModel classical = std::visit(
      [](const auto& m) -> ClassicalModel {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, SeqFitResult>) {
          return LRModel{};
        } else {
          return m;
        }
      },
      model);
  for (auto i : rows) {
    const auto p = predict(classical, data.features.row(i));
    out.scores.push_back(p.score);
    out.predictions.push_back(p.label ? 1 : 0);
  }
  return out;
}

EvalReport evaluate_model(const FittedModel& model, const LabeledData& data,
                          std::span<const std::size_t> rows) {
  const auto s = score_model(model, data, rows);
  const auto y = labels_at(data, rows);
  return evaluate(y, s.scores, s.predictions);
}

std::string_view to_string(SearchMethod method) {
  return method == SearchMethod::kGrid ? "grid" : "random";
}

SearchMethod search_method_from_string(std::string_view name) {
  if (name == "grid") return SearchMethod::kGrid;
  if (name == "random") return SearchMethod::kRandom;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown search method '" + std::string(name) + "' (valid: grid, random)");
}

SearchSpace default_space(ModelFamily family) {
  SearchSpace s;
  s.base.family = family;
  switch (family) {
    case ModelFamily::kLr:
      s.params = {{"c", {1e-4, 0.08, 1.0, 3.0, 7.0, 10.0}}};
      break;
    case ModelFamily::kSvm:
      s.params = {{"kernel", {"linear", "poly", "rbf"}},
                  {"c", {0.08, 1.0, 3.0}},
                  {"gamma", {0.07, 0.1}}};
      break;
    case ModelFamily::kGbt:
      s.params = {{"learning_rate", {0.07, 0.1}}, {"n_estimators", {100, 200}}};
      break;
    default:
      s.params = {{"learning_rate", {1e-4, 5e-4, 1e-3, 5e-3}},
                  {"l2", {1e-5, 1e-3, 0.1}},
                  {"dropout", {0.01, 0.1, 0.2, 0.3}},
                  {"hidden_dim", {64, 128}}};
      break;
  }
  return s;
}

SearchSpace space_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family")) {
    throw Error(ErrorCode::kInvalidArgument, "search space needs a 'family' field");
  }
  SearchSpace s;
  s.base.family = model_family_from_string(get_as<std::string>(j.at("family"), "family"));
  if (j.contains("base")) {
    for (const auto& [key, value] : j.at("base").items()) apply_param(s.base, key, value);
  }
  if (j.contains("params")) {
    for (const auto& [key, values] : j.at("params").items()) {
      if (!values.is_array() || values.empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "search parameter '" + key + "' needs a non-empty list");
      }
      ModelConfig probe = s.base;
      for (const auto& v : values) apply_param(probe, key, v);
      s.params.emplace_back(key, std::vector<json>(values.begin(), values.end()));
    }
  }
  return s;
}

std::vector<ModelConfig> expand(const SearchSpace& space, SearchMethod method,
                                std::size_t n_iter, std::uint64_t seed) {
  std::vector<ModelConfig> out;
  if (space.params.empty()) return {space.base};
  if (method == SearchMethod::kGrid) {
    std::vector<std::size_t> idx(space.params.size(), 0);
    while (true) {
      ModelConfig cfg = space.base;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        apply_param(cfg, space.params[k].first, space.params[k].second[idx[k]]);
      }
      out.push_back(cfg);
      std::size_t k = idx.size();
      while (k > 0) {
        --k;
        if (++idx[k] < space.params[k].second.size()) break;
        idx[k] = 0;
        if (k == 0) return out;
      }
    }
  }
  if (n_iter == 0) throw Error(ErrorCode::kInvalidArgument, "random search needs n_iter >= 1");
  Rng rng(seed);
  for (std::size_t i = 0; i < n_iter; ++i) {
    ModelConfig cfg = space.base;
    for (const auto& [key, values] : space.params) {
      apply_param(cfg, key, values[static_cast<std::size_t>(rng.below(values.size()))]);
    }
    out.push_back(cfg);
  }
  return out;
}

SearchResult search(std::span<const ModelConfig> candidates, const LabeledData& data,
                    std::span<const std::size_t> train, const SplitSpec& inner) {
  if (candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "empty search space");
  const auto y = labels_at(data, train);
  const auto split = stratified_split(y, inner);
  std::vector<std::size_t> fit_rows, val_rows;
  for (auto i : split.train) fit_rows.push_back(train[i]);
  for (auto i : split.test) val_rows.push_back(train[i]);

  SearchResult result;
  bool have_best = false;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    Trial t;
    t.config = candidates[c];
    try {
      const auto model = fit_model(t.config, data, fit_rows);
      t.report = evaluate_model(model, data, val_rows);
      t.ok = true;
    } catch (const Error& e) {
      t.error_code = e.code();
      t.error = e.what();
    }
    if (t.ok && (!have_best || better(t.report, result.trials[result.best].report))) {
      result.best = c;
      have_best = true;
    }
    result.trials.push_back(std::move(t));
  }
  if (!have_best) {
    const auto& first = result.trials.front();
    throw Error(first.error_code, "every configuration failed; first: " + first.error);
  }
  return result;
}

json report_to_json(const EvalReport& r) {
  return json{{"f1", r.f1},
              {"roc_auc", r.roc_auc},
              {"accuracy", r.accuracy},
              {"balanced_accuracy", r.balanced_accuracy},
              {"tp", r.counts.tp},
              {"fp", r.counts.fp},
              {"tn", r.counts.tn},
              {"fn", r.counts.fn}};
}

json model_to_json(const FittedModel& model, const ModelConfig& cfg) {
  json j = json::object();
  j["format"] = "eqr-model";
  j["version"] = 1;
  j["family"] = to_string(family_of(model));
  j["config"] = config_to_json(cfg);
  if (const auto* m = std::get_if<LRModel>(&model)) {
    j["standardizer"] = standardizer_to_json(m->standardizer);
    j["weights"] = m->weights;
    j["bias"] = m->bias;
    j["iterations"] = m->iterations;
    j["grad_norm"] = m->grad_norm;
    j["converged"] = m->converged;
  } else if (const auto* m = std::get_if<SVMModel>(&model)) {
    j["standardizer"] = standardizer_to_json(m->standardizer);
    json sv = json::array();
    for (std::size_t i = 0; i < m->support_vectors.rows(); ++i) {
      const auto r = m->support_vectors.row(i);
      sv.push_back(std::vector<double>(r.begin(), r.end()));
    }
    j["support_vectors"] = sv;
    j["coef"] = m->coef;
    j["bias"] = m->bias;
    j["iterations"] = m->iterations;
  } else if (const auto* m = std::get_if<GBTModel>(&model)) {
    j["base_score"] = m->base_score;
    json trees = json::array();
    for (const auto& t : m->trees) trees.push_back(tree_node_to_json(t, 0));
    j["trees"] = trees;
    j["train_loss"] = m->train_loss;
  } else {
    const auto& s = std::get<SeqFitResult>(model);
    j["hidden_dim"] = s.params.hidden_dim;
    j["input_mean"] = s.params.input_mean;
    j["input_scale"] = s.params.input_scale;
    json tensors = json::array();
    for (const auto& t : s.params.tensors) {
      tensors.push_back(json{{"name", t.name}, {"shape", t.shape}, {"data", t.data}});
    }
    j["tensors"] = tensors;
    j["best_epoch"] = s.best_epoch;
    json log = json::array();
    for (const auto& e : s.log) {
      log.push_back(json{{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_f1", e.val_f1}});
    }
    j["training_log"] = log;
  }
  return j;
}

std::pair<FittedModel, ModelConfig> model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "eqr-model") {
      throw Error(ErrorCode::kFormat, "not a model file");
    }
    const ModelConfig cfg = config_from_json(j.at("config"));
    const auto family = model_family_from_string(j.at("family").get<std::string>());
    if (family != cfg.family) throw Error(ErrorCode::kFormat, "family does not match config");

    switch (family) {
      case ModelFamily::kLr: {
        LRModel m;
        m.config = cfg.lr;
        m.standardizer = standardizer_from_json(j.at("standardizer"));
        m.weights = j.at("weights").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
        m.iterations = j.at("iterations").get<int>();
        m.grad_norm = j.at("grad_norm").get<double>();
        m.converged = j.at("converged").get<bool>();
        m.is_fitted = true;
        if (m.weights.size() != m.standardizer.mean.size()) {
          throw Error(ErrorCode::kFormat, "weight count does not match standardizer");
        }
        return {m, cfg};
      }
      case ModelFamily::kSvm: {
        SVMModel m;
        m.config = cfg.svm;
        m.standardizer = standardizer_from_json(j.at("standardizer"));
        const auto sv = j.at("support_vectors");
        m.support_vectors = FeatureMatrix(0, m.standardizer.mean.size());
        for (const auto& row : sv) m.support_vectors.push_row(row.get<std::vector<double>>());
        m.coef = j.at("coef").get<std::vector<double>>();
        if (m.coef.size() != m.support_vectors.rows() || m.coef.empty()) {
          throw Error(ErrorCode::kFormat, "coef count does not match support vectors");
        }
        m.bias = j.at("bias").get<double>();
        m.iterations = j.at("iterations").get<long>();
        for (double c : m.coef) {
          m.alpha.push_back(std::abs(c));
          m.y.push_back(c >= 0.0 ? 1 : -1);
        }
        return {m, cfg};
      }
      case ModelFamily::kGbt: {
        GBTModel m;
        m.config = cfg.gbt;
        m.base_score = j.at("base_score").get<double>();
        for (const auto& t : j.at("trees")) {
          RegressionTree tree;
          tree_node_from_json(t, tree);
          m.trees.push_back(std::move(tree));
        }
        m.train_loss = j.at("train_loss").get<std::vector<double>>();
        m.is_fitted = true;
        return {m, cfg};
      }
      default: {
        SeqFitResult s;
        s.config = cfg.seq;
        const SeqFamily fam = family == ModelFamily::kNn    ? SeqFamily::kNn
                              : family == ModelFamily::kGru ? SeqFamily::kGru
                                                            : SeqFamily::kLstm;
        s.params = make_params(fam, j.at("hidden_dim").get<std::size_t>());
        s.params.input_mean = j.at("input_mean").get<MetricRow>();
        s.params.input_scale = j.at("input_scale").get<MetricRow>();
        const auto& tensors = j.at("tensors");
        if (tensors.size() != s.params.tensors.size()) {
          throw Error(ErrorCode::kFormat, "tensor count does not match family");
        }
        for (std::size_t i = 0; i < tensors.size(); ++i) {
          auto& t = s.params.tensors[i];
          if (tensors[i].at("name").get<std::string>() != t.name ||
              tensors[i].at("shape").get<std::vector<std::size_t>>() != t.shape) {
            throw Error(ErrorCode::kFormat, "tensor '" + t.name + "' has the wrong name or shape");
          }
          auto data = tensors[i].at("data").get<std::vector<double>>();
          if (data.size() != t.data.size()) {
            throw Error(ErrorCode::kFormat, "tensor '" + t.name + "' has the wrong size");
          }
          t.data = std::move(data);
        }
        s.best_epoch = j.at("best_epoch").get<int>();
        for (const auto& e : j.at("training_log")) {
          s.log.push_back({e.at("epoch").get<int>(), e.at("train_loss").get<double>(),
                           e.at("val_f1").get<double>()});
        }
        return {s, cfg};
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("model file: ") + e.what());
  }
  throw Error(ErrorCode::kFormat, "unreachable");
}

}  // namespace eqr
