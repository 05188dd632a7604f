#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "eqr/error.hpp"
#include "eqr/reasoning_dynamics.hpp"
#include "eqr/synthetic.hpp"
#include "oracles.hpp"

using namespace eqr;
namespace fs = std::filesystem;

namespace {

ReasoningChain dist_chain(const std::vector<std::vector<double>>& steps) {
  ReasoningChain c;
  for (const auto& s : steps) c.steps.emplace_back(StepDistribution{s, false});
  c.meta.step_count = c.steps.size();
  c.meta.question_id = "q";
  return c;
}

ReasoningChain random_raw_chain(Rng& rng, std::size_t steps, std::size_t vocab) {
  ReasoningChain c;
  for (std::size_t s = 0; s < steps; ++s) {
    StepLogits l;
    l.token_count = 1 + static_cast<std::size_t>(rng.below(4));
    l.vocab_size = vocab;
    for (std::size_t i = 0; i < l.token_count * vocab; ++i) l.values.push_back(3.0 * rng.normal());
    c.steps.emplace_back(std::move(l));
  }
  c.meta.step_count = steps;
  return c;
}

}  // namespace

TEST_CASE("csd on identical steps gives identity rows") {
  const auto q = compute_csd(dist_chain({{0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}}));
  REQUIRE(q.rows.size() == 2);
  for (const auto& r : q.rows) {
    CHECK(r.kl == 0.0);
    CHECK(r.js == 0.0);
    CHECK(r.hellinger == 0.0);
    CHECK(r.cosine == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.entropy_diff == 0.0);
  }
  CHECK(q.rows[0].step_index == 1);
  CHECK(q.rows[1].step_index == 2);
}

TEST_CASE("two-step csd matches the smoothed oracle values") {
  const auto q = compute_csd(dist_chain({{0.5, 0.5}, {0.9, 0.1}}));
  REQUIRE(q.rows.size() == 1);
  const auto& r = q.rows[0];
  // Frozen from an extended-precision evaluation with eps = 1e-7, renormalized.
  CHECK(r.kl == doctest::Approx(0.51082526821066821).epsilon(1e-13));
  CHECK(r.js == doctest::Approx(0.10174917108215278).epsilon(1e-13));
  CHECK(r.hellinger == doctest::Approx(0.32491960447414557).epsilon(1e-13));
  CHECK(r.cosine == doctest::Approx(0.78086887038887748).epsilon(1e-13));
  CHECK(r.entropy_diff == doctest::Approx(-0.36806403139060159).epsilon(1e-13));
}

TEST_CASE("row counts follow n - 1 for both algorithms") {
  Rng rng(10);
  for (std::size_t n = 2; n <= 9; ++n) {
    std::vector<std::vector<double>> steps;
    for (std::size_t i = 0; i < n; ++i) steps.push_back(oracle::random_distribution(rng, 6));
    const auto c = dist_chain(steps);
    CHECK(compute_csd(c).rows.size() == n - 1);
    CHECK(compute_sfc(c).rows.size() == n - 1);
  }
}

TEST_CASE("sfc rows anchor on the final step") {
  Rng rng(11);
  const auto a = oracle::random_distribution(rng, 5);
  const auto b = oracle::random_distribution(rng, 5);
  const auto f = oracle::random_distribution(rng, 5);
  const auto sfc = compute_sfc(dist_chain({a, b, f}));
  const auto csd_bf = compute_csd(dist_chain({b, f}));
  REQUIRE(sfc.rows.size() == 2);
  const auto& last = sfc.rows[1];
  CHECK(last.kl == csd_bf.rows[0].kl);
  CHECK(last.js == csd_bf.rows[0].js);
  CHECK(last.hellinger == csd_bf.rows[0].hellinger);
  CHECK(last.cosine == csd_bf.rows[0].cosine);
  CHECK(last.entropy_diff == std::abs(csd_bf.rows[0].entropy_diff));

  // Row 1 recomputed by hand from the smoothed inputs.
  const auto sa = oracle::smooth(a, 1e-7);
  const auto sf = oracle::smooth(f, 1e-7);
  CHECK(std::abs(sfc.rows[0].kl - oracle::kl(sa, sf)) <= 1e-12);
  CHECK(std::abs(sfc.rows[0].entropy_diff -
                 std::abs(oracle::entropy(sa) - oracle::entropy(sf))) <= 1e-12);
}

TEST_CASE("every step equal to the final step gives identity sfc rows") {
  const auto q = compute_sfc(dist_chain({{0.1, 0.9}, {0.1, 0.9}, {0.1, 0.9}, {0.1, 0.9}}));
  for (const auto& r : q.rows) {
    CHECK(r.kl == 0.0);
    CHECK(r.cosine == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("two-step chains agree across algorithms up to the entropy sign") {
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    const auto c = dist_chain({oracle::random_distribution(rng, 8), oracle::random_distribution(rng, 8)});
    const auto a = compute_csd(c).rows.at(0);
    const auto b = compute_sfc(c).rows.at(0);
    CHECK(a.kl == b.kl);
    CHECK(a.js == b.js);
    CHECK(a.hellinger == b.hellinger);
    CHECK(a.cosine == b.cosine);
    CHECK(std::abs(a.entropy_diff) == b.entropy_diff);
    CHECK(b.entropy_diff >= 0.0);
  }
}

TEST_CASE("raw mode and pre-averaged distribution mode agree") {
  Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    const auto raw = random_raw_chain(rng, 5, 12);
    ReasoningChain dist = raw;
    for (auto& s : dist.steps) s = to_distribution(s);
    for (auto algo : {Algorithm::kCsd, Algorithm::kSfc}) {
      const auto a = compute(raw, algo);
      const auto b = compute(dist, algo);
      for (std::size_t k = 0; k < a.rows.size(); ++k) {
        for (auto m : kAllMetrics) CHECK(std::abs(a.rows[k].get(m) - b.rows[k].get(m)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("short and invalid chains are rejected with distinct errors") {
  const auto one = dist_chain({{0.5, 0.5}});
  CHECK_THROWS_WITH_AS(compute_csd(one), doctest::Contains("ChainTooShort"), Error);
  const auto bad = dist_chain({{0.5, 0.5}, {0.7, 0.7}});
  CHECK_THROWS_WITH_AS(compute_sfc(bad), doctest::Contains("InvalidChain"), Error);
}

TEST_CASE("quantify_dataset skips single-step chains and keeps manifest order") {
  const auto dir = fs::temp_directory_path() / "eqr_test_quantify";
  fs::remove_all(dir);
  fs::create_directories(dir);
  TraceManifest m;
  m.dataset_id = "d";
  m.model_id = "m";
  m.vocab_size = 3;
  const std::vector<std::vector<std::vector<double>>> chains = {
      {{0.2, 0.3, 0.5}, {0.3, 0.3, 0.4}, {0.1, 0.1, 0.8}},
      {{0.2, 0.3, 0.5}},
      {{0.6, 0.3, 0.1}, {0.3, 0.3, 0.4}}};
  for (std::size_t i = 0; i < chains.size(); ++i) {
    const auto c = dist_chain(chains[i]);
    const std::string id = "c" + std::to_string(i);
    write_file_bytes(dir / (id + ".eqrt"), write_trace(c, Dtype::kF64));
    m.chains.push_back({id, id + ".eqrt", static_cast<int>(i) + 1, i != 1, c.steps.size()});
  }
  const auto csd = quantify_dataset(m, dir, Algorithm::kCsd);
  REQUIRE(csd.dataset.chains.size() == 2);
  REQUIRE(csd.skipped.size() == 1);
  CHECK(csd.skipped[0].question_id == "c1");
  CHECK(csd.dataset.chains[0].meta.question_id == "c0");
  CHECK(csd.dataset.chains[1].meta.question_id == "c2");

  const auto sfc = quantify_dataset(m, dir, Algorithm::kSfc);
  for (std::size_t i = 0; i < 2; ++i) CHECK(sfc.dataset.chains[i].meta == csd.dataset.chains[i].meta);
  CHECK(sfc.dataset.chains[0].rows != csd.dataset.chains[0].rows);

  TraceManifest empty;
  CHECK(quantify_dataset(empty, dir, Algorithm::kCsd).dataset.chains.empty());
}

TEST_CASE("quantify output is identical for any worker count") {
  const auto dir = fs::temp_directory_path() / "eqr_test_quantify_jobs";
  fs::remove_all(dir);
  SynthDatasetSpec spec;
  spec.n_per_class = 12;
  spec.seed = 3;
  const auto m = gen_dataset(coherent_profile(), volatile_profile(), spec, dir);
  for (auto algo : {Algorithm::kCsd, Algorithm::kSfc}) {
    const auto one = quantified_to_jsonl(quantify_dataset(m, dir, algo, {}, 1).dataset);
    for (unsigned jobs : {2u, 3u, 8u}) {
      CHECK(quantified_to_jsonl(quantify_dataset(m, dir, algo, {}, jobs).dataset) == one);
    }
  }
}

TEST_CASE("quantified JSONL round trip") {
  Rng rng(14);
  QuantifiedDataset ds;
  for (int i = 0; i < 5; ++i) {
    std::vector<std::vector<double>> steps;
    for (int s = 0; s < 2 + i; ++s) steps.push_back(oracle::random_distribution(rng, 7));
    auto c = dist_chain(steps);
    c.meta.question_id = "id\"" + std::to_string(i);
    c.meta.difficulty = 1 + i % 3;
    c.meta.correct = i % 2 == 0;
    ds.chains.push_back(compute_csd(c, {1e-6, false}));
  }
  const auto text = quantified_to_jsonl(ds);
  const auto back = quantified_from_jsonl(text);
  REQUIRE(back.size() == ds.chains.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == ds.chains[i]);
  CHECK(quantified_from_jsonl("").empty());
}

TEST_CASE("malformed JSONL names the line") {
  Rng rng(15);
  QuantifiedDataset ds;
  ds.chains.push_back(compute_csd(dist_chain({{0.5, 0.5}, {0.4, 0.6}})));
  const auto good = quantified_to_jsonl(ds);
  CHECK_THROWS_WITH_AS(quantified_from_jsonl(good + "{\"question_id\": 1}\n"),
                       doctest::Contains("line 2"), Error);
  CHECK_THROWS_WITH_AS(quantified_from_jsonl(good + good + "not json\n"),
                       doctest::Contains("line 3"), Error);
}

TEST_CASE("format_real round-trips and rejects non-finite values") {
  Rng rng(16);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-30, 30));
    CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
  }
  CHECK_THROWS_AS(format_real(NAN), Error);
}
