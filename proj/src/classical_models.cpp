#include "eqr/classical_models.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "eqr/error.hpp"

namespace eqr {

namespace {

void check_training_data(const FeatureMatrix& rows, std::span<const int> labels) {
  if (rows.rows() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(rows.rows()) + " rows vs " +
                                                std::to_string(labels.size()) + " labels");
  }
  std::size_t positives = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    positives += static_cast<std::size_t>(y);
  }
  if (rows.rows() < 2 || positives == 0 || positives == labels.size()) {
    throw Error(ErrorCode::kSingleClassTraining, "training data must contain both classes");
  }
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    for (double v : rows.row(i)) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteFeature, "row " + std::to_string(i) + " is not finite");
      }
    }
  }
}

void check_row(std::span<const double> row, std::size_t expected) {
  if (row.size() != expected) {
    throw Error(ErrorCode::kShapeMismatch, "row has " + std::to_string(row.size()) +
                                               " features, model expects " +
                                               std::to_string(expected));
  }
  for (double v : row) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteFeature, "non-finite feature value");
  }
}

// log(1 + e^s)
double softplus(double s) { return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double mean_log_loss(std::span<const double> margins, std::span<const int> labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) s += softplus(margins[i]) - labels[i] * margins[i];
  return s / static_cast<double>(margins.size());
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void FeatureMatrix::push_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw Error(ErrorCode::kShapeMismatch, "row width mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

FeatureMatrix FeatureMatrix::select(std::span<const std::size_t> indices) const {
  FeatureMatrix out(0, cols_);
  for (std::size_t i : indices) out.push_row(row(i));
  return out;
}

Standardizer Standardizer::fit(const FeatureMatrix& rows) {
  Standardizer s;
  const std::size_t n = rows.rows();
  const std::size_t d = rows.cols();
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  if (n == 0) return s;
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += rows.at(i, j);
    m /= static_cast<double>(n);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += (rows.at(i, j) - m) * (rows.at(i, j) - m);
    v /= static_cast<double>(n);
    s.mean[j] = m;
    // Treat variance at round-off level as constant.
    s.scale[j] = v > 1e-24 * std::max(1.0, m * m) ? std::sqrt(v) : 0.0;
  }
  return s;
}

std::vector<double> Standardizer::transform(std::span<const double> row) const {
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    out[j] = scale[j] > 0.0 ? (row[j] - mean[j]) / scale[j] : 0.0;
  }
  return out;
}

FeatureMatrix Standardizer::transform(const FeatureMatrix& rows) const {
  FeatureMatrix out(0, rows.cols());
  for (std::size_t i = 0; i < rows.rows(); ++i) out.push_row(transform(rows.row(i)));
  return out;
}

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

LRObjective lr_objective(const FeatureMatrix& z, std::span<const int> labels,
                         std::span<const double> weights, double bias, double c) {
  const std::size_t n = z.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  LRObjective out;
  out.grad_w.assign(weights.size(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = z.row(i);
    const double s = dot(weights, row) + bias;
    loss += softplus(s) - labels[i] * s;
    const double r = sigmoid(s) - labels[i];
    for (std::size_t j = 0; j < weights.size(); ++j) out.grad_w[j] += r * row[j];
    out.grad_b += r;
  }
  const double reg = 1.0 / (c * static_cast<double>(n));
  double wsq = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    wsq += weights[j] * weights[j];
    out.grad_w[j] = out.grad_w[j] * inv_n + reg * weights[j];
  }
  out.grad_b *= inv_n;
  out.value = loss * inv_n + 0.5 * reg * wsq;
  return out;
}

LRModel fit_lr(const FeatureMatrix& rows, std::span<const int> labels, const LRConfig& cfg) {
  check_training_data(rows, labels);
  if (!(cfg.c > 0.0)) throw Error(ErrorCode::kInvalidArgument, "LR c must be positive");

  LRModel model;
  model.config = cfg;
  model.standardizer = Standardizer::fit(rows);
  const FeatureMatrix z = model.standardizer.transform(rows);
  const std::size_t d = z.cols();
  const std::size_t dim = d + 1;  // weights then bias

  auto evaluate = [&](const std::vector<double>& x, std::vector<double>& grad) {
    auto obj = lr_objective(z, labels, std::span<const double>(x).first(d), x[d], cfg.c);
    grad = std::move(obj.grad_w);
    grad.push_back(obj.grad_b);
    return obj.value;
  };
  auto norm = [](const std::vector<double>& v) { return std::sqrt(dot(v, v)); };

  std::vector<double> x(dim, 0.0);
  std::vector<double> g;
  double f = evaluate(x, g);

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> history;
  constexpr std::size_t kMemory = 10;
  constexpr double kArmijo = 1e-4;

  std::vector<double> direction(dim), x_new(dim), g_new;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    if (norm(g) <= cfg.tol) break;

    // Two-loop recursion for -H g.
    direction = g;
    std::vector<double> alphas(history.size());
    for (std::size_t k = history.size(); k-- > 0;) {
      alphas[k] = history[k].rho * dot(history[k].s, direction);
      for (std::size_t j = 0; j < dim; ++j) direction[j] -= alphas[k] * history[k].y[j];
    }
    if (!history.empty()) {
      const auto& last = history.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& v : direction) v *= gamma;
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
      const double beta = history[k].rho * dot(history[k].y, direction);
      for (std::size_t j = 0; j < dim; ++j) direction[j] += (alphas[k] - beta) * history[k].s[j];
    }
    for (double& v : direction) v = -v;

    double slope_dir = dot(g, direction);
    if (!(slope_dir < 0.0)) {
      history.clear();
      for (std::size_t j = 0; j < dim; ++j) direction[j] = -g[j];
      slope_dir = -dot(g, g);
    }

    double step = history.empty() ? std::min(1.0, 1.0 / norm(g)) : 1.0;
    double f_new = 0.0;
    bool accepted = false;
    while (step > 1e-20) {
      for (std::size_t j = 0; j < dim; ++j) x_new[j] = x[j] + step * direction[j];
      f_new = evaluate(x_new, g_new);
      if (f_new <= f + kArmijo * step * slope_dir) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (history.empty()) break;  // no descent possible even along -g
      history.clear();
      continue;
    }

    Pair p;
    p.s.resize(dim);
    p.y.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      p.s[j] = x_new[j] - x[j];
      p.y[j] = g_new[j] - g[j];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-16 * norm(p.s) * norm(p.y)) {
      p.rho = 1.0 / sy;
      history.push_back(std::move(p));
      if (history.size() > kMemory) history.pop_front();
    }
    x = x_new;
    g = g_new;
    f = f_new;
    model.objective_trace.push_back(f);
  }

  model.weights.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(d));
  model.bias = x[d];
  model.iterations = it;
  model.grad_norm = norm(g);
  model.converged = model.grad_norm <= cfg.tol;
  model.is_fitted = true;
  return model;
}

double predict_proba_lr(const LRModel& model, std::span<const double> row) {
  if (!model.fitted()) throw Error(ErrorCode::kUnfittedModel, "logistic regression not fitted");
  check_row(row, model.standardizer.mean.size());
  const auto z = model.standardizer.transform(row);
  return sigmoid(dot(std::span<const double>(model.weights).first(z.size()), z) + model.bias);
}

// ---------------------------------------------------------------------------
// SVM
// ---------------------------------------------------------------------------

std::string_view to_string(Kernel kernel) {
  switch (kernel) {
    case Kernel::kLinear: return "linear";
    case Kernel::kPoly: return "poly";
    case Kernel::kRbf: return "rbf";
  }
  return "?";
}

Kernel kernel_from_string(std::string_view name) {
  if (name == "linear") return Kernel::kLinear;
  if (name == "poly") return Kernel::kPoly;
  if (name == "rbf") return Kernel::kRbf;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown kernel '" + std::string(name) + "' (valid: linear, poly, rbf)");
}

double kernel_value(const SVMConfig& cfg, std::span<const double> u, std::span<const double> v) {
  switch (cfg.kernel) {
    case Kernel::kLinear: return dot(u, v);
    case Kernel::kPoly: return std::pow(cfg.gamma * dot(u, v) + 1.0, cfg.degree);
    case Kernel::kRbf: {
      double d2 = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) d2 += (u[i] - v[i]) * (u[i] - v[i]);
      return std::exp(-cfg.gamma * d2);
    }
  }
  return 0.0;
}

SVMModel fit_svm(const FeatureMatrix& rows, std::span<const int> labels, const SVMConfig& cfg) {
  check_training_data(rows, labels);
  if (!(cfg.c > 0.0)) throw Error(ErrorCode::kInvalidArgument, "SVM c must be positive");
  if (cfg.kernel != Kernel::kLinear && !(cfg.gamma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "SVM gamma must be positive");
  }
  if (cfg.kernel == Kernel::kPoly && cfg.degree < 1) {
    throw Error(ErrorCode::kInvalidArgument, "SVM degree must be positive");
  }

  SVMModel model;
  model.config = cfg;
  model.standardizer = Standardizer::fit(rows);
  const FeatureMatrix z = model.standardizer.transform(rows);
  const std::size_t n = z.rows();
  const double c = cfg.c;

  std::vector<int>& y = model.y;
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == 1 ? 1 : -1;

  // Q_ij = y_i y_j K(x_i, x_j), held densely.
  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double k = y[i] * y[j] * kernel_value(cfg, z.row(i), z.row(j));
      q[i * n + j] = k;
      q[j * n + i] = k;
    }
  }
  auto qd = [&](std::size_t i) { return q[i * n + i]; };

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // G = Q alpha - e
  constexpr double kTau = 1e-12;
  auto is_upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto is_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  long iter = 0;
  std::size_t idle = 0;
  double violation = 0.0;
  for (;;) {
    // Working set: maximal violating i, then j by second-order gain.
    double g_max = -INFINITY;
    double g_max2 = -INFINITY;
    std::ptrdiff_t i_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (!is_upper(t) && -grad[t] >= g_max) {
          g_max = -grad[t];
          i_sel = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!is_lower(t) && grad[t] >= g_max) {
        g_max = grad[t];
        i_sel = static_cast<std::ptrdiff_t>(t);
      }
    }
    std::ptrdiff_t j_sel = -1;
    double obj_min = INFINITY;
    if (i_sel >= 0) {
      const auto i = static_cast<std::size_t>(i_sel);
      for (std::size_t t = 0; t < n; ++t) {
        if (y[t] == 1) {
          if (is_lower(t)) continue;
          const double diff = g_max + grad[t];
          g_max2 = std::max(g_max2, grad[t]);
          if (diff > 0.0) {
            double quad = qd(i) + qd(t) - 2.0 * y[i] * q[i * n + t];
            if (quad <= 0.0) quad = kTau;
            const double obj = -(diff * diff) / quad;
            if (obj <= obj_min) {
              obj_min = obj;
              j_sel = static_cast<std::ptrdiff_t>(t);
            }
          }
        } else {
          if (is_upper(t)) continue;
          const double diff = g_max - grad[t];
          g_max2 = std::max(g_max2, -grad[t]);
          if (diff > 0.0) {
            double quad = qd(i) + qd(t) + 2.0 * y[i] * q[i * n + t];
            if (quad <= 0.0) quad = kTau;
            const double obj = -(diff * diff) / quad;
            if (obj <= obj_min) {
              obj_min = obj;
              j_sel = static_cast<std::ptrdiff_t>(t);
            }
          }
        }
      }
    }
    violation = g_max + g_max2;
    if (i_sel < 0 || j_sel < 0 || violation < cfg.tol) break;
    if (++iter > cfg.max_iter) {
      throw Error(ErrorCode::kSolverStall, "SMO exceeded " + std::to_string(cfg.max_iter) +
                                               " iterations (violation " +
                                               std::to_string(violation) + ")");
    }

    const auto i = static_cast<std::size_t>(i_sel);
    const auto j = static_cast<std::size_t>(j_sel);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    const double qij = q[i * n + j];
    if (y[i] != y[j]) {
      double quad = qd(i) + qd(j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = qd(i) + qd(j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    if (dai == 0.0 && daj == 0.0) {
      if (++idle >= n) {
        throw Error(ErrorCode::kSolverStall,
                    "SMO made no progress over a full pass (violation " +
                        std::to_string(violation) + ")");
      }
      continue;
    }
    idle = 0;
    for (std::size_t t = 0; t < n; ++t) grad[t] += q[i * n + t] * dai + q[j * n + t] * daj;
  }

  // Bias from free vectors, or the midpoint of the feasible interval.
  double ub = INFINITY;
  double lb = -INFINITY;
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (is_upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (is_lower(t)) {
      if (y[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

  model.alpha = alpha;
  model.bias = -rho;
  model.max_violation = violation;
  model.iterations = iter;
  model.support_vectors = FeatureMatrix(0, z.cols());
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      model.support_vectors.push_row(z.row(t));
      model.coef.push_back(alpha[t] * y[t]);
    }
  }
  return model;
}

double svm_decision(const SVMModel& model, std::span<const double> row) {
  if (!model.fitted()) throw Error(ErrorCode::kUnfittedModel, "SVM not fitted");
  check_row(row, model.standardizer.mean.size());
  const auto z = model.standardizer.transform(row);
  double f = model.bias;
  for (std::size_t k = 0; k < model.coef.size(); ++k) {
    f += model.coef[k] * kernel_value(model.config, model.support_vectors.row(k), z);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Gradient boosting
// ---------------------------------------------------------------------------

double RegressionTree::predict(std::span<const double> row) const {
  std::size_t k = 0;
  while (nodes[k].feature >= 0) {
    const auto& node = nodes[k];
    k = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] < node.threshold
                                     ? node.left
                                     : node.right);
  }
  return nodes[k].value;
}

namespace {

struct TreeBuilder {
  const FeatureMatrix& x;
  std::span<const double> grad;
  std::span<const double> hess;
  const GBTConfig& cfg;
  RegressionTree tree;

  int build(std::vector<std::size_t>& idx, int depth) {
    double g_sum = 0.0;
    double h_sum = 0.0;
    for (std::size_t i : idx) {
      g_sum += grad[i];
      h_sum += hess[i];
    }
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[node_id].value = -cfg.learning_rate * g_sum / (h_sum + cfg.lambda);
    if (depth >= cfg.max_depth || idx.size() < 2) return node_id;

    const double parent = g_sum * g_sum / (h_sum + cfg.lambda);
    double best_gain = 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order(idx);
    for (std::size_t f = 0; f < x.cols(); ++f) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return x.at(a, f) < x.at(b, f); });
      double gl = 0.0;
      double hl = 0.0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        gl += grad[order[k]];
        hl += hess[order[k]];
        const double lo = x.at(order[k], f);
        const double hi = x.at(order[k + 1], f);
        if (!(lo < hi)) continue;
        const double hr = h_sum - hl;
        if (hl < cfg.min_child_weight || hr < cfg.min_child_weight) continue;
        const double gr = g_sum - gl;
        const double gain =
            0.5 * (gl * gl / (hl + cfg.lambda) + gr * gr / (hr + cfg.lambda) - parent);
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_threshold = lo + (hi - lo) / 2.0;
          if (!(best_threshold > lo)) best_threshold = hi;
        }
      }
    }
    if (best_feature < 0) return node_id;

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) {
      (x.at(i, static_cast<std::size_t>(best_feature)) < best_threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    auto& node = tree.nodes[node_id];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    node.value = 0.0;
    return node_id;
  }
};

}  // namespace

GBTModel fit_gbt(const FeatureMatrix& rows, std::span<const int> labels, const GBTConfig& cfg) {
  check_training_data(rows, labels);
  if (cfg.n_estimators < 0 || cfg.max_depth < 1 || !(cfg.learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid GBT hyperparameters");
  }
  const std::size_t n = rows.rows();
  GBTModel model;
  model.config = cfg;
  const double prevalence =
      static_cast<double>(std::accumulate(labels.begin(), labels.end(), 0)) / static_cast<double>(n);
  model.base_score = std::log(prevalence / (1.0 - prevalence));

  std::vector<double> margin(n, model.base_score);
  std::vector<double> grad(n), hess(n);
  model.train_loss.push_back(mean_log_loss(margin, labels));
  for (int round = 0; round < cfg.n_estimators; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      grad[i] = p - labels[i];
      hess[i] = p * (1.0 - p);
    }
    TreeBuilder builder{rows, grad, hess, cfg, {}};
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    builder.build(idx, 0);
    for (std::size_t i = 0; i < n; ++i) margin[i] += builder.tree.predict(rows.row(i));
    model.trees.push_back(std::move(builder.tree));
    model.train_loss.push_back(mean_log_loss(margin, labels));
  }
  model.is_fitted = true;
  return model;
}

double gbt_margin(const GBTModel& model, std::span<const double> row) {
  if (!model.fitted()) throw Error(ErrorCode::kUnfittedModel, "GBT not fitted");
  for (double v : row) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteFeature, "non-finite feature value");
  }
  double m = model.base_score;
  for (const auto& tree : model.trees) {
    for (const auto& node : tree.nodes) {
      if (node.feature >= 0 && static_cast<std::size_t>(node.feature) >= row.size()) {
        throw Error(ErrorCode::kShapeMismatch, "row narrower than the tree's split feature");
      }
    }
    m += tree.predict(row);
  }
  return m;
}

double predict_proba_gbt(const GBTModel& model, std::span<const double> row) {
  return sigmoid(gbt_margin(model, row));
}

Prediction predict(const ClassicalModel& model, std::span<const double> row) {
  return std::visit(
      [&](const auto& m) -> Prediction {
        using T = std::decay_t<decltype(m)>;
        Prediction p;
        if constexpr (std::is_same_v<T, LRModel>) {
          p.score = predict_proba_lr(m, row);
          p.label = p.score > 0.5;
        } else if constexpr (std::is_same_v<T, SVMModel>) {
          p.score = svm_decision(m, row);
          p.label = p.score > 0.0;
        } else {
          p.score = predict_proba_gbt(m, row);
          p.label = p.score > 0.5;
        }
        return p;
      },
      model);
}

}  // namespace eqr
