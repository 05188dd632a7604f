#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace eqr {

// Confusion counts with "correct" (label 1) as the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
};

Confusion confusion(std::span<const int> labels, std::span<const int> predictions);

// 2tp / (2tp + fp + fn); defined as 0 when the denominator is 0.
double f1(const Confusion& c);
double accuracy(const Confusion& c);
// Mean of per-class recalls; a class absent from the labels contributes 0.
double balanced_accuracy(const Confusion& c);

// Throw kLengthMismatch on unequal or empty inputs.
double f1(std::span<const int> labels, std::span<const int> predictions);
double accuracy(std::span<const int> labels, std::span<const int> predictions);
double balanced_accuracy(std::span<const int> labels, std::span<const int> predictions);

// Mann-Whitney statistic P(s_pos > s_neg) + 0.5 P(tie), computed from
// average ranks in O(n log n). Throws kSingleClassLabels.
double roc_auc(std::span<const int> labels, std::span<const double> scores);

struct EvalReport {
  double f1 = 0.0;
  double roc_auc = 0.0;
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  Confusion counts;
};

// roc_auc is reported as 0.5 when only one class is present.
EvalReport evaluate(std::span<const int> labels, std::span<const double> scores,
                    std::span<const int> predictions);

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Per-class seeded permutation; each class contributes round(fraction * n_c)
// rows to the test side, clamped so both sides keep at least one row of every
// class. Throws kClassTooSmall if a class has fewer than two rows.
Split stratified_split(std::span<const int> labels, const SplitSpec& spec);

}  // namespace eqr
