#include "dna/reward.hpp"

namespace dna {

std::optional<int> extract_answer(std::span<const int> tokens,
                                  const Vocabulary& vocab) {
  if (tokens.size() != 3) return std::nullopt;
  if (tokens[0] != vocab.ans_open() || tokens[2] != vocab.ans_close()) {
    return std::nullopt;
  }
  if (!vocab.is_option(tokens[1])) return std::nullopt;
  return tokens[1];
}

RewardBreakdown score(const TaskVariant& variant, std::span<const int> tokens,
                      const Vocabulary& vocab, double format_weight) {
  RewardBreakdown r;
  r.extracted_option = extract_answer(tokens, vocab);
  if (r.extracted_option) {
    r.format = format_weight;
    r.correctness = *r.extracted_option == variant.gold_option ? 1.0 : 0.0;
  }
  r.total = r.correctness + r.format;
  return r;
}

}  // namespace dna
