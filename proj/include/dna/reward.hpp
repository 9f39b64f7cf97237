#ifndef DNA_REWARD_HPP_
#define DNA_REWARD_HPP_

#include <optional>
#include <span>

#include "dna/synth_env.hpp"

namespace dna {

struct RewardBreakdown {
  double correctness = 0.0;  // r_c in {0, 1}
  double format = 0.0;       // r_f in {0, w_f}
  double total = 0.0;        // r_c + r_f
  std::optional<int> extracted_option;

  bool correct() const { return correctness == 1.0; }
};

// Some(k) iff tokens == [ANS_OPEN, OPT_k, ANS_CLOSE].
std::optional<int> extract_answer(std::span<const int> tokens,
                                  const Vocabulary& vocab);

// Deterministic verifier. An unparseable response earns neither reward.
RewardBreakdown score(const TaskVariant& variant, std::span<const int> tokens,
                      const Vocabulary& vocab, double format_weight);

}  // namespace dna

#endif  // DNA_REWARD_HPP_
