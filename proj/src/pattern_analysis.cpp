#include "eqr/pattern_analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <utility>

#include "csv_util.hpp"
#include "eqr/error.hpp"

namespace eqr {

namespace {

constexpr std::string_view kTrajectoryHeader = "step_index,correct,difficulty,n,mean,sd";
constexpr std::string_view kGroupHeader = "group,low,high,total,correct,accuracy_pct";

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename F>
void for_each_line(std::string_view text, std::string_view header, F&& on_row) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      if (line_no == 1) {
        if (line != header) throw Error(ErrorCode::kFormat, "unexpected header '" + line + "'");
        continue;
      }
      if (line.empty()) continue;
      on_row(csv::split_commas(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::kFormat, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (line_no == 0) throw Error(ErrorCode::kFormat, "missing header");
}

}  // namespace

std::string_view to_string(Stratify stratify) {
  return stratify == Stratify::kCorrectness ? "correctness" : "correctness_difficulty";
}

Stratify stratify_from_string(std::string_view name) {
  if (name == "correctness") return Stratify::kCorrectness;
  if (name == "correctness_difficulty") return Stratify::kCorrectnessDifficulty;
  throw Error(ErrorCode::kInvalidArgument, "unknown stratification '" + std::string(name) +
                                               "' (valid: correctness, correctness_difficulty)");
}

std::vector<TrajectoryStat> trajectory_stats(std::span<const QuantifiedChain> chains,
                                             MetricKind metric, Stratify stratify,
                                             std::size_t min_support) {
  // Key: (correct, difficulty or -1). std::map keeps incorrect first.
  std::map<std::pair<bool, int>, std::vector<const QuantifiedChain*>> strata;
  for (const auto& c : chains) {
    const int d = stratify == Stratify::kCorrectness ? -1 : c.meta.difficulty;
    strata[{c.meta.correct, d}].push_back(&c);
  }

  std::vector<TrajectoryStat> out;
  std::vector<double> values;
  for (const auto& [key, members] : strata) {
    std::size_t longest = 0;
    for (const auto* c : members) longest = std::max(longest, c->rows.size());
    for (std::size_t s = 1; s <= longest; ++s) {
      values.clear();
      for (const auto* c : members) {
        if (c->rows.size() >= s) values.push_back(c->rows[s - 1].get(metric));
      }
      if (values.empty() || values.size() < min_support) continue;
      // Shifted by the first value so constant columns give sd exactly 0.
      const double n = static_cast<double>(values.size());
      const double shift = values.front();
      double sum = 0.0;
      for (double v : values) sum += v - shift;
      const double offset = sum / n;
      const double mean = shift + offset;
      double ss = 0.0;
      for (double v : values) ss += (v - shift - offset) * (v - shift - offset);

      TrajectoryStat st;
      st.step_index = s;
      st.correct = key.first;
      if (key.second >= 0) st.difficulty = key.second;
      st.n = values.size();
      st.mean = mean;
      st.sd = std::sqrt(ss / n);
      out.push_back(st);
    }
  }
  return out;
}

std::string_view to_string(LengthGroup group) {
  switch (group) {
    case LengthGroup::kShort: return "short";
    case LengthGroup::kMedium: return "medium";
    case LengthGroup::kLong: return "long";
  }
  return "short";
}

LengthGroup StepLengthGrouping::classify(std::size_t steps) const {
  if (steps <= low) return LengthGroup::kShort;
  if (steps <= high) return LengthGroup::kMedium;
  return LengthGroup::kLong;
}

StepLengthGrouping infer_thresholds(std::span<const std::size_t> step_counts) {
  std::vector<std::size_t> sorted(step_counts.begin(), step_counts.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> uniq = sorted;
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  if (uniq.size() < 3) {
    throw Error(ErrorCode::kDegenerateDistribution,
                "need at least 3 distinct step counts, got " + std::to_string(uniq.size()));
  }
  const std::size_t n = sorted.size();
  StepLengthGrouping g;
  g.low = sorted[(n + 2) / 3 - 1];
  g.high = sorted[(2 * n + 2) / 3 - 1];
  if (g.high <= g.low) {
    const auto above = std::upper_bound(uniq.begin(), uniq.end(), g.low);
    if (above != uniq.end()) {
      g.high = *above;
    } else {
      g.high = g.low;
      g.low = *(std::lower_bound(uniq.begin(), uniq.end(), g.high) - 1);
    }
  }
  return g;
}

std::vector<GroupAccuracy> group_accuracy(std::span<const ChainMeta> chains,
                                          const StepLengthGrouping& grouping) {
  std::array<GroupAccuracy, 3> acc{};
  for (std::size_t i = 0; i < 3; ++i) acc[i].group = static_cast<LengthGroup>(i);
  for (const auto& m : chains) {
    auto& a = acc[static_cast<std::size_t>(grouping.classify(m.step_count))];
    ++a.total;
    if (m.correct) ++a.correct;
  }
  std::vector<GroupAccuracy> out;
  for (auto& a : acc) {
    if (a.total == 0) continue;
    a.accuracy_pct = 100.0 * static_cast<double>(a.correct) / static_cast<double>(a.total);
    out.push_back(a);
  }
  return out;
}

std::string trajectory_csv(std::span<const TrajectoryStat> stats) {
  std::string s(kTrajectoryHeader);
  s += '\n';
  for (const auto& st : stats) {
    s += std::to_string(st.step_index) + ',' + (st.correct ? "1" : "0") + ',';
    if (st.difficulty) s += std::to_string(*st.difficulty);
    s += ',' + std::to_string(st.n) + ',' + real(st.mean) + ',' + real(st.sd) + '\n';
  }
  return s;
}

std::vector<TrajectoryStat> trajectory_from_csv(std::string_view text) {
  std::vector<TrajectoryStat> out;
  for_each_line(text, kTrajectoryHeader, [&](const std::vector<std::string_view>& cells) {
    if (cells.size() != 6) throw Error(ErrorCode::kFormat, "expected 6 columns");
    TrajectoryStat st;
    st.step_index = csv::parse_count(cells[0]);
    if (cells[1] != "0" && cells[1] != "1") throw Error(ErrorCode::kFormat, "correct must be 0 or 1");
    st.correct = cells[1] == "1";
    if (!cells[2].empty()) st.difficulty = static_cast<int>(csv::parse_count(cells[2]));
    st.n = csv::parse_count(cells[3]);
    st.mean = csv::parse_real(cells[4]);
    st.sd = csv::parse_real(cells[5]);
    out.push_back(st);
  });
  return out;
}

std::string group_accuracy_csv(std::span<const GroupAccuracy> groups,
                               const StepLengthGrouping& grouping) {
  std::string s(kGroupHeader);
  s += '\n';
  for (const auto& g : groups) {
    s += std::string(to_string(g.group)) + ',' + std::to_string(grouping.low) + ',' +
         std::to_string(grouping.high) + ',' + std::to_string(g.total) + ',' +
         std::to_string(g.correct) + ',' + real(g.accuracy_pct) + '\n';
  }
  return s;
}

std::vector<GroupAccuracy> group_accuracy_from_csv(std::string_view text) {
  std::vector<GroupAccuracy> out;
  for_each_line(text, kGroupHeader, [&](const std::vector<std::string_view>& cells) {
    if (cells.size() != 6) throw Error(ErrorCode::kFormat, "expected 6 columns");
    GroupAccuracy g;
    if (cells[0] == "short") g.group = LengthGroup::kShort;
    else if (cells[0] == "medium") g.group = LengthGroup::kMedium;
    else if (cells[0] == "long") g.group = LengthGroup::kLong;
    else throw Error(ErrorCode::kFormat, "unknown group '" + std::string(cells[0]) + "'");
    g.total = csv::parse_count(cells[3]);
    g.correct = csv::parse_count(cells[4]);
    g.accuracy_pct = csv::parse_real(cells[5]);
    out.push_back(g);
  });
  return out;
}

}  // namespace eqr
