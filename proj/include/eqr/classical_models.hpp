#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace eqr {

// Dense row-major feature matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  std::span<double> row(std::size_t i) { return std::span<double>(data_).subspan(i * cols_, cols_); }
  double& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  void push_row(std::span<const double> values);
  FeatureMatrix select(std::span<const std::size_t> indices) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Labels are 1 (correct, the positive class) or 0.
using Labels = std::vector<int>;

// Per-feature z-scoring fit on training rows. Zero-variance columns map to 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // population std; 0 marks a constant column

  static Standardizer fit(const FeatureMatrix& rows);
  std::vector<double> transform(std::span<const double> row) const;
  FeatureMatrix transform(const FeatureMatrix& rows) const;
};

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

struct LRConfig {
  double c = 1.0;  // inverse L2 strength
  int max_iter = 1000;
  double tol = 1e-6;
};

struct LRModel {
  LRConfig config;
  Standardizer standardizer;
  std::vector<double> weights;
  double bias = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
  std::vector<double> objective_trace;  // objective after each accepted iteration
  bool is_fitted = false;

  bool fitted() const { return is_fitted; }
};

// Mean logistic loss plus ||w||^2 / (2 c n) over standardized rows; the bias
// is not penalized. Same minimizer as C * sum(loss) + ||w||^2 / 2.
struct LRObjective {
  double value = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};
LRObjective lr_objective(const FeatureMatrix& z, std::span<const int> labels,
                         std::span<const double> weights, double bias, double c);

// L-BFGS with Armijo backtracking. Throws kSingleClassTraining, kNonFiniteFeature.
LRModel fit_lr(const FeatureMatrix& rows, std::span<const int> labels, const LRConfig& cfg = {});
double predict_proba_lr(const LRModel& model, std::span<const double> row);

// ---------------------------------------------------------------------------
// Kernel SVM (soft-margin dual, SMO with second-order working-set selection)
// ---------------------------------------------------------------------------

enum class Kernel { kLinear, kPoly, kRbf };
std::string_view to_string(Kernel kernel);
Kernel kernel_from_string(std::string_view name);

struct SVMConfig {
  Kernel kernel = Kernel::kRbf;
  double c = 1.0;
  double gamma = 0.1;
  int degree = 3;
  double tol = 1e-3;
  long max_iter = 10'000'000;
};

double kernel_value(const SVMConfig& cfg, std::span<const double> u, std::span<const double> v);

struct SVMModel {
  SVMConfig config;
  Standardizer standardizer;
  FeatureMatrix support_vectors;  // standardized
  std::vector<double> coef;       // alpha_i * y_i (y in {-1, +1}) per support vector
  std::vector<double> alpha;      // full dual solution, one per training row
  std::vector<int> y;             // training labels in {-1, +1}
  double bias = 0.0;
  double max_violation = 0.0;
  long iterations = 0;

  bool fitted() const { return !alpha.empty(); }
};

// Throws kSingleClassTraining, kNonFiniteFeature, kSolverStall.
SVMModel fit_svm(const FeatureMatrix& rows, std::span<const int> labels, const SVMConfig& cfg = {});
double svm_decision(const SVMModel& model, std::span<const double> row);

// ---------------------------------------------------------------------------
// Gradient-boosted trees on logistic loss
// ---------------------------------------------------------------------------

struct GBTConfig {
  double learning_rate = 0.1;
  int n_estimators = 100;
  int max_depth = 3;
  double lambda = 1.0;            // L2 on leaf values
  double min_child_weight = 1.0;  // minimum hessian sum per child
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // taken when x[feature] < threshold
  int right = -1;
  double value = 0.0;  // leaf output, learning rate already applied
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double predict(std::span<const double> row) const;
};

struct GBTModel {
  GBTConfig config;
  double base_score = 0.0;  // log-odds of the training prevalence
  std::vector<RegressionTree> trees;
  std::vector<double> train_loss;  // mean log-loss before round 1, then after each round
  bool is_fitted = false;

  bool fitted() const { return is_fitted; }
};

// Throws kSingleClassTraining, kNonFiniteFeature.
GBTModel fit_gbt(const FeatureMatrix& rows, std::span<const int> labels, const GBTConfig& cfg = {});
double gbt_margin(const GBTModel& model, std::span<const double> row);
double predict_proba_gbt(const GBTModel& model, std::span<const double> row);

// ---------------------------------------------------------------------------

using ClassicalModel = std::variant<LRModel, SVMModel, GBTModel>;

struct Prediction {
  double score = 0.0;  // probability (LR, GBT) or decision value (SVM)
  bool label = false;  // ties go to the negative class
};

// Throws kUnfittedModel, kNonFiniteFeature.
Prediction predict(const ClassicalModel& model, std::span<const double> row);

double sigmoid(double x);

}  // namespace eqr
