#include <gtest/gtest.h>

#include <vector>

#include "dna/reward.hpp"

namespace dna {
namespace {

const Vocabulary kVocab(4);
const int kOpen = kVocab.ans_open();
const int kClose = kVocab.ans_close();

TaskVariant variant_with_gold(int gold) {
  TaskVariant v;
  v.gold_option = gold;
  return v;
}

TEST(ExtractAnswer, TemplateMatches) {
  const std::vector<int> t = {kOpen, 1, kClose};
  EXPECT_EQ(extract_answer(t, kVocab), 1);
}

TEST(ExtractAnswer, MalformedSequencesYieldNothing) {
  EXPECT_FALSE(extract_answer(std::vector<int>{1, 1, 1}, kVocab));
  EXPECT_FALSE(extract_answer(std::vector<int>{kOpen, kClose, kClose}, kVocab));
  EXPECT_FALSE(extract_answer(std::vector<int>{kClose, 1, kOpen}, kVocab));
  EXPECT_FALSE(extract_answer(std::vector<int>{kOpen, 1}, kVocab));
  EXPECT_FALSE(extract_answer(std::vector<int>{kOpen, 1, kClose, kClose}, kVocab));
  EXPECT_FALSE(extract_answer(std::vector<int>{kOpen, 7, kClose}, kVocab));
  EXPECT_FALSE(extract_answer(std::vector<int>{}, kVocab));
}

TEST(Score, CorrectAnswerEarnsBothComponents) {
  const auto r = score(variant_with_gold(2), std::vector<int>{kOpen, 2, kClose}, kVocab, 0.1);
  EXPECT_EQ(r.correctness, 1.0);
  EXPECT_EQ(r.format, 0.1);
  EXPECT_DOUBLE_EQ(r.total, 1.1);
  EXPECT_TRUE(r.correct());
}

TEST(Score, WrongOptionKeepsFormatReward) {
  const auto r = score(variant_with_gold(2), std::vector<int>{kOpen, 0, kClose}, kVocab, 0.1);
  EXPECT_EQ(r.correctness, 0.0);
  EXPECT_EQ(r.format, 0.1);
  EXPECT_EQ(r.extracted_option, 0);
}

TEST(Score, InvalidFormatBlocksCorrectness) {
  const auto r = score(variant_with_gold(2), std::vector<int>{2, 2, 2}, kVocab, 0.1);
  EXPECT_EQ(r.correctness, 0.0);
  EXPECT_EQ(r.format, 0.0);
  EXPECT_EQ(r.total, 0.0);
  EXPECT_FALSE(r.extracted_option);
}

// Every length-3 sequence over |V| = 6: exactly one is rewarded per gold.
TEST(Score, ExhaustiveBinaryRewardWithoutFormatBonus) {
  for (int gold = 0; gold < 4; ++gold) {
    int rewarded = 0, well_formed = 0;
    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 6; ++b) {
        for (int c = 0; c < 6; ++c) {
          const auto r = score(variant_with_gold(gold), std::vector<int>{a, b, c}, kVocab, 0.0);
          EXPECT_TRUE(r.total == 0.0 || r.total == 1.0);
          rewarded += r.total == 1.0;
          well_formed += r.extracted_option.has_value();
          EXPECT_EQ(r.correct(), a == kOpen && b == gold && c == kClose);
        }
      }
    }
    EXPECT_EQ(rewarded, 1);
    EXPECT_EQ(well_formed, 4);
  }
}

}  // namespace
}  // namespace dna
