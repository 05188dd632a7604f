#include "eqr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eqr/error.hpp"
#include "eqr/rng.hpp"

namespace eqr {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b || a == 0) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(a) + " labels vs " + std::to_string(b) + " predictions");
  }
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Confusion confusion(std::span<const int> labels, std::span<const int> predictions) {
  check_lengths(labels.size(), predictions.size());
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool y = labels[i] != 0;
    const bool p = predictions[i] != 0;
    if (y && p) ++c.tp;
    else if (!y && p) ++c.fp;
    else if (!y && !p) ++c.tn;
    else ++c.fn;
  }
  return c;
}

double f1(const Confusion& c) { return ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn); }
double accuracy(const Confusion& c) { return ratio(c.tp + c.tn, c.total()); }
double balanced_accuracy(const Confusion& c) {
  return 0.5 * (ratio(c.tp, c.tp + c.fn) + ratio(c.tn, c.tn + c.fp));
}

double f1(std::span<const int> labels, std::span<const int> predictions) {
  return f1(confusion(labels, predictions));
}
double accuracy(std::span<const int> labels, std::span<const int> predictions) {
  return accuracy(confusion(labels, predictions));
}
double balanced_accuracy(std::span<const int> labels, std::span<const int> predictions) {
  return balanced_accuracy(confusion(labels, predictions));
}

double roc_auc(std::span<const int> labels, std::span<const double> scores) {
  check_lengths(labels.size(), scores.size());
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of (1-based, tie-averaged) ranks of the positives.
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0) {
        rank_sum += avg_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::kSingleClassLabels, "ROC-AUC needs both classes");
  }
  const double np = static_cast<double>(positives);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(negatives));
}

EvalReport evaluate(std::span<const int> labels, std::span<const double> scores,
                    std::span<const int> predictions) {
  EvalReport r;
  r.counts = confusion(labels, predictions);
  r.f1 = f1(r.counts);
  r.accuracy = accuracy(r.counts);
  r.balanced_accuracy = balanced_accuracy(r.counts);
  try {
    r.roc_auc = roc_auc(labels, scores);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingleClassLabels) throw;
    r.roc_auc = 0.5;
  }
  return r;
}

Split stratified_split(std::span<const int> labels, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "test_fraction must be in (0, 1)");
  }
  Split out;
  Rng rng(spec.seed);
  for (int cls : {1, 0}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if ((labels[i] != 0) == (cls == 1)) members.push_back(i);
    }
    if (members.size() < 2) {
      throw Error(ErrorCode::kClassTooSmall, "class " + std::to_string(cls) + " has " +
                                                 std::to_string(members.size()) + " row(s)");
    }
    rng.shuffle(std::span<std::size_t>(members));
    auto n_test = static_cast<std::size_t>(
        std::floor(spec.test_fraction * static_cast<double>(members.size()) + 0.5));
    n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    out.test.insert(out.test.end(), members.begin(),
                    members.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test),
                     members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace eqr
