#ifndef DNA_ADVANTAGE_HPP_
#define DNA_ADVANTAGE_HPP_

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dna/policy.hpp"
#include "dna/reward.hpp"

namespace dna {

// Population std below this is treated as a degenerate group (all A_i = 0).
inline constexpr double kStdGuard = 1e-8;
// Duality scaling is skipped when either group's l1 mass is below this.
inline constexpr double kSignalGuard = 1e-12;

// A_i = (R_i - mean R) / popstd(R), population std (divide by G).
template <typename Derived>
VectorX<typename Derived::Scalar> group_advantages(
    const Eigen::MatrixBase<Derived>& rewards) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index g = rewards.size();
  if (g < 2) {
    throw std::invalid_argument("group_advantages: need G >= 2, got " +
                                std::to_string(g));
  }
  const Scalar mean = rewards.mean();
  const VectorX<Scalar> centered = rewards.array() - mean;
  const Scalar popstd = std::sqrt(centered.squaredNorm() / Scalar(g));
  if (popstd < Scalar(kStdGuard)) return VectorX<Scalar>::Zero(g);
  return centered / popstd;
}

// Mean absolute advantage S = (1/G) sum_i |A_i|.
template <typename Derived>
typename Derived::Scalar l1_signal(const Eigen::MatrixBase<Derived>& advantages) {
  if (advantages.size() == 0) return 0;
  return advantages.cwiseAbs().mean();
}

// Binary-reward closed form of l1_signal: 2 sqrt(R(1 - R)).
template <typename Scalar>
Scalar l1_signal_closed_form(Scalar mean_correctness) {
  return Scalar(2) * std::sqrt(mean_correctness * (Scalar(1) - mean_correctness));
}

// Keep iff the group has at least one correct and one incorrect response.
inline bool keep_group(int num_correct, int group_size) {
  return num_correct > 0 && num_correct < group_size;
}

template <typename Scalar>
struct RolloutGroup {
  VariantKind kind = VariantKind::kReal;
  VectorX<Scalar> observation;  // the prompt all responses answer
  std::vector<Response<Scalar>> responses;
  std::vector<RewardBreakdown> rewards;
  Scalar mean_correctness = 0;
  VectorX<Scalar> advantages;  // sequence-level, broadcast to every token
  bool filtered = false;

  int size() const { return static_cast<int>(responses.size()); }
  int num_correct() const {
    int n = 0;
    for (const auto& r : rewards) n += r.correct() ? 1 : 0;
    return n;
  }
  int num_tokens() const {
    int n = 0;
    for (const auto& r : responses) n += static_cast<int>(r.tokens.size());
    return n;
  }
};

// Scores responses' rewards into a group with advantages from total rewards.
template <typename Scalar>
RolloutGroup<Scalar> make_group(VariantKind kind, VectorX<Scalar> observation,
                                std::vector<Response<Scalar>> responses,
                                std::vector<RewardBreakdown> rewards) {
  if (responses.size() != rewards.size()) {
    throw std::invalid_argument("make_group: responses/rewards size mismatch");
  }
  RolloutGroup<Scalar> g;
  g.kind = kind;
  g.observation = std::move(observation);
  g.responses = std::move(responses);
  g.rewards = std::move(rewards);
  VectorX<Scalar> totals(g.size());
  for (int i = 0; i < g.size(); ++i) totals(i) = static_cast<Scalar>(g.rewards[i].total);
  g.mean_correctness = Scalar(g.num_correct()) / Scalar(g.size());
  g.advantages = group_advantages(totals);
  return g;
}

template <typename Scalar>
bool dynamic_filter(const RolloutGroup<Scalar>& group) {
  return keep_group(group.num_correct(), group.size());
}

template <typename Scalar>
struct DualityScale {
  Scalar target = 0;
  Scalar alpha_real = 1;
  Scalar alpha_cf = 1;
  bool skipped = false;  // a signal fell below kSignalGuard
};

// alpha_* = S_target / S_* with S_target = (S_R + S_CF) / 2.
template <typename Scalar>
DualityScale<Scalar> duality_scale(Scalar s_real, Scalar s_cf) {
  DualityScale<Scalar> out;
  out.target = (s_real + s_cf) / Scalar(2);
  if (s_real < Scalar(kSignalGuard) || s_cf < Scalar(kSignalGuard)) {
    out.skipped = true;
    return out;
  }
  out.alpha_real = out.target / s_real;
  out.alpha_cf = out.target / s_cf;
  return out;
}

template <typename Scalar>
struct DualityBatchEntry {
  std::string pair_id;
  RolloutGroup<Scalar> real_group;
  RolloutGroup<Scalar> cf_group;
  Scalar s_real = 0;  // l1 mass before scaling; 0 for a filtered group
  Scalar s_cf = 0;
  Scalar s_target = 0;
  Scalar alpha_real = 1;
  Scalar alpha_cf = 1;
  bool scale_skipped = false;

  bool both_survive() const { return !real_group.filtered && !cf_group.filtered; }
  bool single_survivor() const { return real_group.filtered != cf_group.filtered; }
  bool empty() const { return real_group.filtered && cf_group.filtered; }
};

struct EntryOptions {
  bool dynamic_filter = true;  // drop all-correct / all-wrong groups
  bool normalize = true;       // apply duality scaling when both survive
};

// Filters each group, measures its l1 mass and, when both survive, rescales
// each group's advantages so both carry mass S_target. A lone survivor keeps
// alpha = 1.
template <typename Scalar>
DualityBatchEntry<Scalar> build_duality_entry(std::string pair_id,
                                              RolloutGroup<Scalar> real_group,
                                              RolloutGroup<Scalar> cf_group,
                                              EntryOptions options = {}) {
  DualityBatchEntry<Scalar> e;
  e.pair_id = std::move(pair_id);
  e.real_group = std::move(real_group);
  e.cf_group = std::move(cf_group);
  e.real_group.filtered = options.dynamic_filter && !dynamic_filter(e.real_group);
  e.cf_group.filtered = options.dynamic_filter && !dynamic_filter(e.cf_group);
  if (!e.real_group.filtered) e.s_real = l1_signal(e.real_group.advantages);
  if (!e.cf_group.filtered) e.s_cf = l1_signal(e.cf_group.advantages);

  if (e.both_survive()) {
    if (options.normalize) {
      const auto scale = duality_scale(e.s_real, e.s_cf);
      e.s_target = scale.target;
      e.alpha_real = scale.alpha_real;
      e.alpha_cf = scale.alpha_cf;
      e.scale_skipped = scale.skipped;
      e.real_group.advantages *= e.alpha_real;
      e.cf_group.advantages *= e.alpha_cf;
    } else {
      e.s_target = (e.s_real + e.s_cf) / Scalar(2);
    }
  } else if (!e.real_group.filtered) {
    e.s_target = e.s_real;
  } else if (!e.cf_group.filtered) {
    e.s_target = e.s_cf;
  }
  return e;
}

}  // namespace dna

#endif  // DNA_ADVANTAGE_HPP_
