#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "dna/advantage.hpp"
#include "test_support.hpp"

namespace dna {
namespace {

using testing::group_from_correctness;

Vector rewards(std::initializer_list<double> r) {
  Vector v(static_cast<Eigen::Index>(r.size()));
  std::copy(r.begin(), r.end(), v.data());
  return v;
}

TEST(GroupAdvantages, HandArithmeticSingleCorrect) {
  // mean 1/4, popstd sqrt(3)/4: A = (3/4)/(sqrt(3)/4) = sqrt(3), (-1/4)/(sqrt(3)/4) = -1/sqrt(3).
  const Vector a = group_advantages(rewards({1, 0, 0, 0}));
  EXPECT_NEAR(a(0), std::sqrt(3.0), 1e-12);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(a(i), -1.0 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(a(0), 1.732051, 1e-6);
  EXPECT_NEAR(a(1), -0.577350, 1e-6);
}

TEST(GroupAdvantages, HalfCorrectIsUnitMagnitude) {
  const Vector a = group_advantages(rewards({1, 1, 0, 0}));
  EXPECT_NEAR(a(0), 1.0, 1e-12);
  EXPECT_NEAR(a(1), 1.0, 1e-12);
  EXPECT_NEAR(a(2), -1.0, 1e-12);
  EXPECT_NEAR(a(3), -1.0, 1e-12);
}

TEST(GroupAdvantages, ConstantRewardsHitStdGuard) {
  EXPECT_EQ(group_advantages(rewards({1, 1, 1, 1})), Vector::Zero(4));
  EXPECT_EQ(group_advantages(rewards({1.1, 1.1, 1.1})), Vector::Zero(3));
}

TEST(GroupAdvantages, RejectsTinyGroups) {
  EXPECT_THROW(group_advantages(rewards({1})), std::invalid_argument);
}

TEST(GroupAdvantages, StandardizedMoments) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int g = 2 + static_cast<int>(rng.uniform_index(31));
    Vector r(g);
    for (int i = 0; i < g; ++i) r(i) = static_cast<double>(rng.uniform_index(2));
    if (r.minCoeff() == r.maxCoeff()) continue;
    const Vector a = group_advantages(r);
    EXPECT_NEAR(a.mean(), 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(a.squaredNorm() / g), 1.0, 1e-9);
  }
}

TEST(DynamicFilter, KeepsOnlyMixedGroups) {
  EXPECT_TRUE(dynamic_filter(group_from_correctness({1, 0, 0, 0})));
  EXPECT_FALSE(dynamic_filter(group_from_correctness({1, 1, 1, 1})));
  EXPECT_FALSE(dynamic_filter(group_from_correctness({0, 0, 0, 0})));
  // Format reward does not rescue an all-wrong group.
  EXPECT_FALSE(dynamic_filter(group_from_correctness({0, 0, 0, 0}, 4, 0, 0.1)));
}

TEST(L1Signal, MatchesClosedForm) {
  const Vector a = group_advantages(rewards({1, 0, 0, 0}));
  // (sqrt(3) + 3/sqrt(3)) / 4 = sqrt(3)/2
  EXPECT_NEAR(l1_signal(a), std::sqrt(3.0) / 2.0, 1e-12);
  EXPECT_NEAR(l1_signal(a), 0.866025, 1e-6);
  EXPECT_NEAR(l1_signal_closed_form(0.25), l1_signal(a), 1e-12);
  EXPECT_EQ(l1_signal_closed_form(0.5), 1.0);
  EXPECT_EQ(l1_signal(group_advantages(rewards({0, 0, 0}))), 0.0);
}

// Binary rewards: c ones among G. Direct mean |A| from explicit sums.
TEST(L1Signal, ExhaustiveBinaryGroups) {
  for (int g = 2; g <= 32; ++g) {
    for (int c = 1; c < g; ++c) {
      Vector r = Vector::Zero(g);
      r.head(c).setOnes();
      const double rbar = static_cast<double>(c) / g;
      EXPECT_NEAR(l1_signal(group_advantages(r)), 2.0 * std::sqrt(rbar * (1.0 - rbar)), 1e-9)
          << "G=" << g << " c=" << c;
    }
  }
}

TEST(L1Signal, ConcaveAndPeakedAtHalf) {
  double prev = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double s = l1_signal_closed_form(i / 100.0);
    EXPECT_GT(s, prev);
    prev = s;
  }
  for (int i = 1; i < 99; ++i) {
    const double x = i / 100.0;
    const double mid = l1_signal_closed_form(x);
    const double chord =
        0.5 * (l1_signal_closed_form(x - 0.01) + l1_signal_closed_form(x + 0.01));
    EXPECT_GE(mid, chord);
    EXPECT_NEAR(l1_signal_closed_form(x), l1_signal_closed_form(1.0 - x), 1e-15);
  }
}

TEST(DualityScale, RatioArithmetic) {
  const auto s = duality_scale(0.6, 1.0);
  EXPECT_NEAR(s.target, 0.8, 1e-15);
  EXPECT_NEAR(s.alpha_real, 0.8 / 0.6, 1e-15);
  EXPECT_NEAR(s.alpha_real, 1.333333, 1e-6);
  EXPECT_NEAR(s.alpha_cf, 0.8, 1e-15);

  const auto t = duality_scale(0.866025, 0.4);
  EXPECT_NEAR(t.target, 0.6330125, 1e-12);
  EXPECT_NEAR(t.alpha_real, 0.6330125 / 0.866025, 1e-12);
  EXPECT_NEAR(t.alpha_cf, 1.58253125, 1e-12);
  EXPECT_NEAR(t.alpha_cf, 1.582532, 1e-6);

  const auto u = duality_scale(0.7, 0.7);
  EXPECT_EQ(u.alpha_real, 1.0);
  EXPECT_EQ(u.alpha_cf, 1.0);
}

TEST(DualityScale, SkipsDegenerateSignal) {
  const auto s = duality_scale(0.0, 0.9);
  EXPECT_TRUE(s.skipped);
  EXPECT_EQ(s.alpha_real, 1.0);
  EXPECT_EQ(s.alpha_cf, 1.0);
}

std::vector<int> with_correct(int g, int c) {
  std::vector<int> v(static_cast<std::size_t>(g), 0);
  std::fill(v.begin(), v.begin() + c, 1);
  return v;
}

TEST(BuildDualityEntry, EqualizesMassAcrossVariants) {
  // R = 0.9 gives S = 0.6; R = 0.5 gives S = 1.0.
  const auto e = build_duality_entry("p", group_from_correctness(with_correct(10, 9)),
                                     group_from_correctness(with_correct(10, 5)));
  ASSERT_TRUE(e.both_survive());
  EXPECT_NEAR(e.s_real, 0.6, 1e-12);
  EXPECT_NEAR(e.s_cf, 1.0, 1e-12);
  EXPECT_NEAR(e.s_target, 0.8, 1e-12);
  EXPECT_NEAR(l1_signal(e.real_group.advantages), 0.8, 1e-9);
  EXPECT_NEAR(l1_signal(e.cf_group.advantages), 0.8, 1e-9);
  EXPECT_NEAR(e.alpha_real * e.s_real, e.alpha_cf * e.s_cf, 1e-9);
}

TEST(BuildDualityEntry, LoneSurvivorKeepsItsAdvantages) {
  const auto real = group_from_correctness({1, 0, 0, 0});
  const auto e = build_duality_entry("p", real, group_from_correctness({0, 0, 0, 0}));
  EXPECT_TRUE(e.single_survivor());
  EXPECT_TRUE(e.cf_group.filtered);
  EXPECT_EQ(e.alpha_real, 1.0);
  EXPECT_EQ(e.real_group.advantages, real.advantages);
  EXPECT_EQ(e.s_cf, 0.0);
}

TEST(BuildDualityEntry, BothFilteredIsEmpty) {
  const auto e = build_duality_entry("p", group_from_correctness({1, 1, 1, 1}),
                                     group_from_correctness({0, 0, 0, 0}));
  EXPECT_TRUE(e.empty());
  EXPECT_EQ(e.s_real, 0.0);
  EXPECT_EQ(e.s_cf, 0.0);
}

TEST(BuildDualityEntry, WithoutNormalizationAlphaIsOne) {
  const auto e = build_duality_entry("p", group_from_correctness(with_correct(10, 9)),
                                     group_from_correctness(with_correct(10, 5)),
                                     {.dynamic_filter = true, .normalize = false});
  EXPECT_EQ(e.alpha_real, 1.0);
  EXPECT_EQ(e.alpha_cf, 1.0);
  EXPECT_NEAR(l1_signal(e.real_group.advantages), 0.6, 1e-12);
}

TEST(BuildDualityEntry, PreservesSignsAndRanking) {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int g = 2 + static_cast<int>(rng.uniform_index(15));
    std::vector<int> cr(static_cast<std::size_t>(g)), cc(cr.size());
    for (auto& x : cr) x = static_cast<int>(rng.uniform_index(2));
    for (auto& x : cc) x = static_cast<int>(rng.uniform_index(2));
    const auto real = group_from_correctness(cr, 4, 0, 0.1);
    const auto cf = group_from_correctness(cc, 4, 1, 0.1, VariantKind::kCounterfactual);
    const auto plain = build_duality_entry("p", real, cf, {true, false});
    const auto scaled = build_duality_entry("p", real, cf, {true, true});
    for (const auto* pair : {&plain.real_group, &plain.cf_group}) {
      const auto& other = pair == &plain.real_group ? scaled.real_group : scaled.cf_group;
      for (int i = 0; i < pair->size(); ++i) {
        EXPECT_EQ(std::signbit(pair->advantages(i)), std::signbit(other.advantages(i)));
        for (int j = 0; j < pair->size(); ++j) {
          if (pair->advantages(i) < pair->advantages(j)) {
            EXPECT_LT(other.advantages(i), other.advantages(j));
          }
        }
      }
    }
  }
}

}  // namespace
}  // namespace dna
