#include <gtest/gtest.h>

#include <algorithm>

#include "dna/eval.hpp"
#include "test_support.hpp"

namespace dna {
namespace {

std::vector<TaskPair> dataset(int n, std::uint64_t seed = 3) {
  EnvSpec spec;
  spec.num_pairs = n;
  spec.seed = seed;
  return generate_dataset(spec);
}

// Answers whatever the prior block points to, i.e. the real gold.
PolicyParams<double> real_gold_policy(int k, int dim) {
  const Vocabulary vocab(k);
  PolicyParams<double> p(3, vocab.size(), dim);
  p.bias(0)(vocab.ans_open()) = 50.0;
  p.bias(2)(vocab.ans_close()) = 50.0;
  for (int j = 0; j < k; ++j) p.weight(1)(j, j) = 50.0;
  return p;
}

// Always well formed; the option is uniform over the K choices.
PolicyParams<double> uniform_option_policy(int k, int dim) {
  const Vocabulary vocab(k);
  PolicyParams<double> p(3, vocab.size(), dim);
  p.bias(0)(vocab.ans_open()) = 60.0;
  p.bias(2)(vocab.ans_close()) = 60.0;
  for (int j = 0; j < k; ++j) p.bias(1)(j) = 60.0;
  return p;
}

PairResult result(std::string id, std::string cat, bool real, bool cf) {
  return {std::move(id), std::move(cat), real, cf, real && cf};
}

// True iff |observed - p| is within 3 binomial standard errors at n trials.
::testing::AssertionResult within_3_sigma(double observed, double p, int n) {
  const double sigma = std::sqrt(p * (1.0 - p) / n);
  if (std::abs(observed - p) <= 3.0 * sigma) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure()
         << observed << " is more than 3 sigma (" << sigma << ") from " << p;
}

TEST(Evaluate, RealGoldPolicyFailsEveryCounterfactual) {
  const auto pairs = dataset(200);
  const auto results = evaluate(real_gold_policy(4, pairs[0].feature_dim()), pairs);
  const auto table = aggregate(results);
  EXPECT_EQ(table.overall.acc_real, 100.0);
  EXPECT_EQ(table.overall.acc_cf, 0.0);
  EXPECT_EQ(table.overall.acc_both, 0.0);
  EXPECT_EQ(table.overall.n, 200);
}

TEST(Evaluate, ResultsOrderedByPairId) {
  auto pairs = dataset(50);
  std::reverse(pairs.begin(), pairs.end());
  const auto results = evaluate(real_gold_policy(4, pairs[0].feature_dim()), pairs);
  EXPECT_TRUE(std::is_sorted(results.begin(), results.end(),
                             [](const auto& a, const auto& b) { return a.pair_id < b.pair_id; }));
}

// A sampled uniform policy emits the single rewarded sequence with
// probability (1/6)^3; the two variants are sampled independently.
TEST(Evaluate, UniformPolicyMatchesTemplateProbability) {
  const int n = 10000;
  const auto pairs = dataset(n);
  const PolicyParams<double> p(3, 6, pairs[0].feature_dim());
  const auto table = aggregate(evaluate(p, pairs, {.temperature = 1.0, .seed = 9}));
  const double q = 1.0 / 216.0;
  EXPECT_NEAR(q * 100.0, 0.463, 1e-3);
  EXPECT_TRUE(within_3_sigma(table.overall.acc_real / 100.0, q, n));
  EXPECT_TRUE(within_3_sigma(table.overall.acc_cf / 100.0, q, n));
  EXPECT_TRUE(within_3_sigma(table.overall.acc_both / 100.0, q * q, n));
}

TEST(Evaluate, IndependentDecisionsGiveProductBoth) {
  const int n = 10000;
  const auto pairs = dataset(n);
  const auto table = aggregate(evaluate(uniform_option_policy(4, pairs[0].feature_dim()),
                                        pairs, {.temperature = 1.0, .seed = 4}));
  EXPECT_TRUE(within_3_sigma(table.overall.acc_real / 100.0, 0.25, n));
  EXPECT_TRUE(within_3_sigma(table.overall.acc_cf / 100.0, 0.25, n));
  EXPECT_TRUE(within_3_sigma(table.overall.acc_both / 100.0,
                             table.overall.acc_real * table.overall.acc_cf / 1e4, n));
}

TEST(Evaluate, GreedyIgnoresSeedAndWorkers) {
  const auto pairs = dataset(100);
  const auto p = testing::random_params(3, 6, pairs[0].feature_dim(), 1.0, 8);
  const auto a = pair_results_csv(evaluate(p, pairs, {.seed = 1}));
  EXPECT_EQ(a, pair_results_csv(evaluate(p, pairs, {.seed = 99})));
  EXPECT_EQ(a, pair_results_csv(evaluate(p, pairs, {.seed = 5, .workers = 3})));
}

TEST(Evaluate, RejectsMismatchedCheckpoint) {
  const auto pairs = dataset(5);
  EXPECT_THROW(evaluate(PolicyParams<double>(3, 7, pairs[0].feature_dim()), pairs),
               ConfigError);
  EXPECT_THROW(evaluate(PolicyParams<double>(3, 6, pairs[0].feature_dim() + 1), pairs),
               ConfigError);
}

TEST(Aggregate, CountsTwoPairs) {
  const std::vector<PairResult> r = {result("a", "x", true, true), result("b", "x", true, false)};
  const auto t = aggregate(r);
  EXPECT_EQ(t.overall.acc_real, 100.0);
  EXPECT_EQ(t.overall.acc_cf, 50.0);
  EXPECT_EQ(t.overall.acc_both, 50.0);
  ASSERT_EQ(t.categories.size(), 1u);
  EXPECT_EQ(t.categories[0].acc_real, t.overall.acc_real);
  EXPECT_EQ(t.categories[0].acc_cf, t.overall.acc_cf);
  EXPECT_EQ(t.categories[0].acc_both, t.overall.acc_both);
  EXPECT_EQ(t.categories[0].n, 2);
  EXPECT_EQ(report_csv(t), "category,n,acc_real,acc_cf,acc_both\n"
                           "x,2,100.0,50.0,50.0\n"
                           "Overall,2,100.0,50.0,50.0\n");
}

TEST(Aggregate, OverallIsCountWeighted) {
  const std::vector<PairResult> r = {result("a", "x", true, true), result("b", "y", false, true),
                                     result("c", "y", false, false)};
  const auto t = aggregate(r);
  ASSERT_EQ(t.categories.size(), 2u);
  EXPECT_EQ(t.categories[0].category, "x");
  EXPECT_NEAR(t.overall.acc_cf,
              (t.categories[0].acc_cf * t.categories[0].n + t.categories[1].acc_cf * t.categories[1].n) / 3.0,
              1e-12);
  EXPECT_NE(report_text(t).find("Overall"), std::string::npos);
}

TEST(Aggregate, PropertiesOverRandomPredictions) {
  Rng rng(12);
  const std::vector<std::string> cats = {"a", "b", "c"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PairResult> r;
    const int n = 1 + static_cast<int>(rng.uniform_index(40));
    for (int i = 0; i < n; ++i) {
      r.push_back(result("p" + std::to_string(i), cats[rng.uniform_index(3)],
                         rng.uniform() < 0.6, rng.uniform() < 0.3));
    }
    const auto t = aggregate(r);
    for (const auto& row : t.categories) {
      EXPECT_LE(row.acc_both, std::min(row.acc_real, row.acc_cf));
    }
    EXPECT_LE(t.overall.acc_both, std::min(t.overall.acc_real, t.overall.acc_cf));
    std::vector<PairResult> shuffled = r;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.uniform_index(i)]);
    }
    EXPECT_EQ(report_csv(aggregate(shuffled)), report_csv(t));
  }
}

}  // namespace
}  // namespace dna
