#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "eqr/error.hpp"
#include "eqr/pattern_analysis.hpp"
#include "eqr/rng.hpp"

using namespace eqr;

namespace {

QuantifiedChain chain_with(std::size_t rows, bool correct, int difficulty, Rng& rng) {
  QuantifiedChain c;
  c.meta.correct = correct;
  c.meta.difficulty = difficulty;
  c.meta.step_count = rows + 1;
  for (std::size_t i = 1; i <= rows; ++i) {
    StepMetrics m;
    m.step_index = i;
    m.kl = rng.uniform();
    m.js = rng.uniform() * 0.69;
    m.hellinger = rng.uniform();
    m.cosine = rng.uniform();
    m.entropy_diff = rng.normal();
    c.rows.push_back(m);
  }
  return c;
}

ChainMeta meta(std::size_t steps, bool correct) {
  ChainMeta m;
  m.step_count = steps;
  m.correct = correct;
  return m;
}

}  // namespace

TEST_CASE("availability counting across uneven lengths") {
  Rng rng(100);
  const std::vector<QuantifiedChain> chains = {chain_with(3, true, 1, rng), chain_with(5, true, 1, rng)};
  // Lengths here are row counts, so indices 1..3 have both chains.
  const auto st = trajectory_stats(chains, MetricKind::kKl, Stratify::kCorrectness, 1);
  REQUIRE(st.size() == 5);
  for (const auto& s : st) CHECK(s.n == (s.step_index <= 3 ? 2u : 1u));
  CHECK(st[4].sd == 0.0);
}

TEST_CASE("chains of 3 and 5 steps give n=2 at indices 1-2 and n=1 at 3-4") {
  Rng rng(101);
  const std::vector<QuantifiedChain> chains = {chain_with(2, false, 2, rng), chain_with(4, false, 2, rng)};
  const auto st = trajectory_stats(chains, MetricKind::kJs, Stratify::kCorrectness, 1);
  REQUIRE(st.size() == 4);
  CHECK(st[0].n == 2);
  CHECK(st[1].n == 2);
  CHECK(st[2].n == 1);
  CHECK(st[3].n == 1);
}

TEST_CASE("support cutoff and identical chains") {
  Rng rng(102);
  std::vector<QuantifiedChain> four;
  for (int i = 0; i < 4; ++i) four.push_back(chain_with(6, true, 1, rng));
  CHECK(trajectory_stats(four, MetricKind::kKl, Stratify::kCorrectness).empty());

  std::vector<QuantifiedChain> same(6, four[0]);
  const auto st = trajectory_stats(same, MetricKind::kHellinger, Stratify::kCorrectness);
  REQUIRE(st.size() == 6);
  for (const auto& s : st) {
    CHECK(s.sd == 0.0);
    CHECK(s.mean == four[0].rows[s.step_index - 1].hellinger);
  }
}

TEST_CASE("trajectory statistics match a brute-force recomputation") {
  Rng rng(103);
  std::vector<QuantifiedChain> chains;
  for (int i = 0; i < 60; ++i) {
    chains.push_back(chain_with(2 + rng.below(10), rng.bernoulli(0.5), 1 + static_cast<int>(rng.below(3)), rng));
  }
  for (auto stratify : {Stratify::kCorrectness, Stratify::kCorrectnessDifficulty}) {
    for (auto metric : {MetricKind::kKl, MetricKind::kEntropyDiff}) {
      const auto st = trajectory_stats(chains, metric, stratify, 3);
      CHECK_FALSE(st.empty());
      for (const auto& s : st) {
        CHECK(s.difficulty.has_value() == (stratify == Stratify::kCorrectnessDifficulty));
        std::vector<double> v;
        for (const auto& c : chains) {
          if (c.meta.correct != s.correct) continue;
          if (s.difficulty && c.meta.difficulty != *s.difficulty) continue;
          if (c.rows.size() >= s.step_index) v.push_back(c.rows[s.step_index - 1].get(metric));
        }
        REQUIRE(v.size() == s.n);
        CHECK(s.n >= 3);
        long double m = 0;
        for (double x : v) m += x;
        m /= v.size();
        long double ss = 0;
        for (double x : v) ss += (x - m) * (x - m);
        CHECK(std::abs(s.mean - static_cast<double>(m)) <= 1e-12);
        CHECK(std::abs(s.sd - std::sqrt(static_cast<double>(ss / v.size()))) <= 1e-12);
      }
      // Incorrect strata come first, then ascending step index within a stratum.
      for (std::size_t i = 1; i < st.size(); ++i) {
        const auto key = [](const TrajectoryStat& t) {
          return std::make_tuple(t.correct, t.difficulty.value_or(-1), t.step_index);
        };
        CHECK(key(st[i - 1]) < key(st[i]));
      }
    }
  }
}

TEST_CASE("threshold inference") {
  const std::vector<std::size_t> uniform = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  auto g = infer_thresholds(uniform);
  CHECK(g.low == 3);
  CHECK(g.high == 6);

  const std::vector<std::size_t> banded = {3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 15};
  g = infer_thresholds(banded);
  CHECK(g.low == 6);
  CHECK(g.high == 10);

  // Collisions move the upper cut to the next distinct count.
  const std::vector<std::size_t> heavy = {2, 2, 2, 2, 2, 5, 9};
  g = infer_thresholds(heavy);
  CHECK(g.low == 2);
  CHECK(g.high == 5);
  const std::vector<std::size_t> top = {1, 2, 3, 3, 3, 3, 3};
  g = infer_thresholds(top);
  CHECK(g.low == 2);
  CHECK(g.high == 3);

  const std::vector<std::size_t> flat(10, 4);
  CHECK_THROWS_WITH_AS(infer_thresholds(flat), doctest::Contains("DegenerateDistribution"), Error);
  const std::vector<std::size_t> two = {4, 5, 4, 5};
  CHECK_THROWS_AS(infer_thresholds(two), Error);
}

TEST_CASE("threshold inference ignores input order and keeps low < high") {
  Rng rng(104);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> counts(3 + rng.below(40));
    for (auto& c : counts) c = 1 + rng.below(3 + rng.below(20));
    std::vector<std::size_t> distinct = counts;
    std::sort(distinct.begin(), distinct.end());
    if (std::unique(distinct.begin(), distinct.end()) - distinct.begin() < 3) continue;
    const auto a = infer_thresholds(counts);
    rng.shuffle(std::span<std::size_t>(counts));
    const auto b = infer_thresholds(counts);
    CHECK(a.low == b.low);
    CHECK(a.high == b.high);
    CHECK(a.low < a.high);
  }
}

TEST_CASE("group accuracy") {
  const StepLengthGrouping g{6, 10};
  CHECK(g.classify(6) == LengthGroup::kShort);
  CHECK(g.classify(7) == LengthGroup::kMedium);
  CHECK(g.classify(10) == LengthGroup::kMedium);
  CHECK(g.classify(11) == LengthGroup::kLong);

  const std::vector<ChainMeta> chains = {meta(3, true),  meta(4, false), meta(5, true), meta(6, false),
                                         meta(12, true), meta(13, false), meta(20, false)};
  const auto acc = group_accuracy(chains, g);
  REQUIRE(acc.size() == 2);
  CHECK(acc[0].group == LengthGroup::kShort);
  CHECK(acc[0].accuracy_pct == 50.0);
  CHECK(acc[1].group == LengthGroup::kLong);
  CHECK(acc[1].accuracy_pct == doctest::Approx(33.33).epsilon(1e-4));

  const std::vector<ChainMeta> all_good = {meta(2, true), meta(8, true), meta(30, true)};
  for (const auto& a : group_accuracy(all_good, g)) CHECK(a.accuracy_pct == 100.0);
}

TEST_CASE("groups partition the chains and recover overall accuracy") {
  Rng rng(105);
  std::vector<ChainMeta> chains;
  std::size_t correct = 0;
  for (int i = 0; i < 300; ++i) {
    chains.push_back(meta(1 + rng.below(25), rng.bernoulli(0.6)));
    correct += chains.back().correct;
  }
  std::vector<std::size_t> counts;
  for (const auto& m : chains) counts.push_back(m.step_count);
  const auto acc = group_accuracy(chains, infer_thresholds(counts));
  std::size_t total = 0;
  double weighted = 0;
  for (const auto& a : acc) {
    total += a.total;
    weighted += a.accuracy_pct * a.total;
  }
  CHECK(total == chains.size());
  CHECK(std::abs(weighted / total - 100.0 * correct / chains.size()) <= 1e-12);
}

TEST_CASE("plot-data files") {
  Rng rng(106);
  std::vector<QuantifiedChain> chains;
  for (int i = 0; i < 20; ++i) chains.push_back(chain_with(4 + i % 3, i % 2 == 0, 1 + i % 3, rng));
  const auto st = trajectory_stats(chains, MetricKind::kCosine, Stratify::kCorrectnessDifficulty, 2);
  const auto text = trajectory_csv(st);
  CHECK(trajectory_from_csv(text) == st);
  CHECK(trajectory_csv(st) == text);
  CHECK(trajectory_csv({}) == "step_index,correct,difficulty,n,mean,sd\n");
  CHECK(trajectory_from_csv(trajectory_csv({})).empty());

  const StepLengthGrouping g{6, 10};
  const std::vector<ChainMeta> metas = {meta(3, true), meta(7, false), meta(15, true)};
  const auto acc = group_accuracy(metas, g);
  const auto gtext = group_accuracy_csv(acc, g);
  CHECK(group_accuracy_from_csv(gtext) == acc);
  CHECK(gtext.rfind("group,low,high,total,correct,accuracy_pct\nshort,6,10,1,1,100\n", 0) == 0);

  CHECK_THROWS_WITH_AS(trajectory_from_csv("step_index,correct,difficulty,n,mean,sd\n1,0,,3,0.5\n"),
                       doctest::Contains("line 2"), Error);
  CHECK_THROWS_AS(group_accuracy_from_csv("nope\n"), Error);
}
