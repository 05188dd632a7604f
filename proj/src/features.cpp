#include "eqr/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "csv_util.hpp"
#include "eqr/error.hpp"

namespace eqr {

namespace {

std::vector<double> column(const QuantifiedChain& chain, MetricKind kind) {
  std::vector<double> out;
  out.reserve(chain.rows.size());
  for (const auto& r : chain.rows) out.push_back(r.get(kind));
  return out;
}

double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

double slope(std::span<const double> seq) {
  if (seq.empty()) throw Error(ErrorCode::kEmptySequence, "slope of an empty sequence");
  const std::size_t k = seq.size();
  if (k == 1) return 0.0;
  const double x_mean = (static_cast<double>(k) + 1.0) / 2.0;
  const double y_mean = mean(seq);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = static_cast<double>(i + 1) - x_mean;
    sxy += dx * (seq[i] - y_mean);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double max_jump(std::span<const double> seq) {
  if (seq.empty()) throw Error(ErrorCode::kEmptySequence, "max_jump of an empty sequence");
  double best = 0.0;
  for (std::size_t i = 1; i < seq.size(); ++i) best = std::max(best, std::abs(seq[i] - seq[i - 1]));
  return best;
}

FeatureVector extract_features(const QuantifiedChain& chain) {
  if (chain.rows.empty()) {
    throw Error(ErrorCode::kEmptyChain, "chain '" + chain.meta.question_id + "' has no rows");
  }
  FeatureVector f{};
  std::size_t k = 0;
  for (auto kind : {MetricKind::kKl, MetricKind::kJs, MetricKind::kHellinger}) {
    const auto xs = column(chain, kind);
    f[k++] = mean(xs);
    f[k++] = slope(xs);
    f[k++] = max_jump(xs);
    f[k++] = xs.back();
  }
  const auto cos = column(chain, MetricKind::kCosine);
  f[k++] = mean(cos);
  f[k++] = slope(cos);
  f[k++] = cos.back();

  const auto ent = column(chain, MetricKind::kEntropyDiff);
  const double m = mean(ent);
  double var = 0.0;
  double cumulative = 0.0;
  for (double x : ent) {
    var += (x - m) * (x - m);
    cumulative += x;
  }
  f[k++] = m;
  f[k++] = std::sqrt(var / static_cast<double>(ent.size()));
  f[k++] = ent.back();
  f[k++] = max_jump(ent);
  f[k++] = cumulative;
  f[k++] = ent.back() - ent.front();
  return f;
}

FeatureRow feature_row(const QuantifiedChain& chain) {
  FeatureRow row;
  row.question_id = chain.meta.question_id;
  row.difficulty = chain.meta.difficulty;
  row.correct = chain.meta.correct;
  row.algorithm = chain.algorithm;
  row.features = extract_features(chain);
  return row;
}

std::string features_to_csv(std::span<const FeatureRow> rows) {
  std::string out;
  for (auto name : kFeatureNames) {
    out += name;
    out += ',';
  }
  out += "question_id,difficulty,correct,algorithm\n";
  for (const auto& row : rows) {
    if (row.question_id.find_first_of(",\n\r\"") != std::string::npos) {
      throw Error(ErrorCode::kFormat, "question_id '" + row.question_id +
                                          "' cannot be written unquoted");
    }
    for (double v : row.features) {
      out += format_real(v);
      out += ',';
    }
    out += row.question_id + "," + std::to_string(row.difficulty) + "," +
           (row.correct ? "1" : "0") + "," + std::string(to_string(row.algorithm)) + "\n";
  }
  return out;
}

std::vector<FeatureRow> features_from_csv(std::string_view text) {
  std::vector<FeatureRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  constexpr std::size_t kColumns = kFeatureCount + 4;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = csv::split_commas(line);
    try {
      if (cells.size() != kColumns) {
        throw Error(ErrorCode::kFormat, "expected " + std::to_string(kColumns) +
                                            " columns, found " + std::to_string(cells.size()));
      }
      if (line_no == 1) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
          if (cells[i] != kFeatureNames[i]) {
            throw Error(ErrorCode::kFormat, "header column " + std::to_string(i + 1) +
                                                " is '" + std::string(cells[i]) + "'");
          }
        }
        continue;
      }
      FeatureRow row;
      for (std::size_t i = 0; i < kFeatureCount; ++i) row.features[i] = csv::parse_real(cells[i]);
      row.question_id = std::string(cells[kFeatureCount]);
      row.difficulty = static_cast<int>(csv::parse_real(cells[kFeatureCount + 1]));
      const auto correct = cells[kFeatureCount + 2];
      if (correct != "0" && correct != "1") {
        throw Error(ErrorCode::kFormat, "correct must be 0 or 1");
      }
      row.correct = correct == "1";
      row.algorithm = algorithm_from_string(cells[kFeatureCount + 3]);
      rows.push_back(std::move(row));
    } catch (const Error& e) {
      throw Error(ErrorCode::kFormat, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (line_no == 0) throw Error(ErrorCode::kFormat, "feature table has no header");
  return rows;
}

}  // namespace eqr
