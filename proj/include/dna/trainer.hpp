#ifndef DNA_TRAINER_HPP_
#define DNA_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dna/advantage.hpp"
#include "dna/policy.hpp"
#include "dna/synth_env.hpp"

namespace dna {

using Params = PolicyParams<double>;
using Group = RolloutGroup<double>;
using Entry = DualityBatchEntry<double>;

enum class Mode { kGrpo, kDapo, kDna };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);  // throws ConfigError

struct TrainConfig {
  Mode mode = Mode::kDna;
  int group_size = 16;
  int batch_pairs = 32;
  double eps_low = 0.2;
  double eps_high = 0.28;
  int inner_epochs = 2;
  double learning_rate = 2.0;       // RL step size
  double sft_learning_rate = 0.05;  // SFT step size
  int sft_epochs = 1;
  int rl_steps = 400;
  double format_weight = 0.1;
  double temperature = 1.0;
  int seq_len = 3;
  double init_std = 0.0;  // 0 = zero init (uniform policy)
  std::uint64_t seed = 1;
  int workers = 1;

  // Upper clip bound actually used: GRPO clips symmetrically.
  double effective_eps_high() const {
    return mode == Mode::kGrpo ? eps_low : eps_high;
  }
  EntryOptions entry_options() const {
    return {.dynamic_filter = mode != Mode::kGrpo,
            .normalize = mode == Mode::kDna};
  }
  void validate() const;  // throws ConfigError
};

// A batch is a list of pair indices; every pair contributes one real and one
// counterfactual prompt.
using Batch = std::vector<std::size_t>;

// One shuffled pass over the dataset in whole-pair batches of exactly
// batch_pairs; a trailing remainder smaller than batch_pairs is dropped.
// Throws ConfigError when batch_pairs exceeds the dataset size.
std::vector<Batch> balanced_batches(std::size_t num_pairs, int batch_pairs,
                                    Rng& rng);

// Endless stream of balanced batches. Epoch e is shuffled with its own
// derived seed, so the sequence depends only on (seed, num_pairs, batch_pairs).
class BatchStream {
 public:
  BatchStream(std::size_t num_pairs, int batch_pairs, std::uint64_t seed);
  const Batch& next();
  std::uint64_t epoch() const { return epoch_; }

 private:
  void refill();

  std::size_t num_pairs_;
  int batch_pairs_;
  std::uint64_t seed_;
  std::uint64_t epoch_ = 0;
  std::vector<Batch> batches_;
  std::size_t cursor_ = 0;
};

// The SFT target for a variant: [ANS_OPEN, OPT_gold, ANS_CLOSE].
std::vector<int> sft_target(const TaskVariant& variant, const Vocabulary& vocab);

struct LossAndGrad {
  double loss = 0.0;
  Params grad;
};

// Mean over the batch's 2 * |batch| prompts of -log p(target | obs).
LossAndGrad sft_loss(const Params& params, std::span<const TaskPair> pairs,
                     const Batch& batch);

// One plain gradient-descent step; returns the pre-update loss. Throws
// NumericError on a non-finite loss or gradient.
double sft_step(Params& params, std::span<const TaskPair> pairs,
                const Batch& batch, double learning_rate);

struct SurrogateResult {
  double loss = 0.0;  // negated clipped objective
  Params grad;
  int groups = 0;         // surviving groups that contributed tokens
  int tokens = 0;         // tokens across surviving groups
  int clipped_tokens = 0; // tokens whose clipped branch binds
};

// Clipped token-mean surrogate over the surviving groups of `entries`:
//   J = mean_g [ 1/sum_i|o_i| * sum_i sum_t min(r A, clip(r, 1-lo, 1+hi) A) ]
// with r = pi(o_t) / pi_old(o_t). Returns loss = -J and its exact gradient.
// Throws std::invalid_argument if params_old is empty or mis-shaped.
SurrogateResult dapo_loss(const Params& params, const Params& params_old,
                          std::span<const Entry> entries, double eps_low,
                          double eps_high);

struct StepMetrics {
  int step = 0;
  Mode mode = Mode::kDna;
  double loss = 0.0;
  double acc_real = 0.0;  // mean correctness over real groups
  double acc_cf = 0.0;
  double s_real = 0.0;    // mean pre-scaling l1 mass, surviving real groups
  double s_cf = 0.0;
  double alpha_real = 1.0;  // mean over pairs where both groups survive
  double alpha_cf = 1.0;
  double filtered_fraction = 0.0;
  double clip_fraction = 0.0;
  double grad_norm = 0.0;
  int single_survivors = 0;
  int scale_skipped = 0;
};

struct RlState {
  Params params;
  int step = 0;
};

struct RlStepResult {
  StepMetrics metrics;
  std::vector<Entry> entries;
};

// Samples G responses for both variants of every pair in the batch from a
// frozen snapshot, builds duality entries per the configured mode, then takes
// inner_epochs gradient steps on the clipped surrogate. Prompt k of step s
// samples from its own stream derived from (seed, s, k), so results do not
// depend on the worker count.
RlStepResult rl_step(RlState& state, std::span<const TaskPair> pairs,
                     const Batch& batch, const TrainConfig& config);

// Writes CSV header + rows with the fixed metric columns.
std::string metrics_csv_header();
std::string metrics_csv_row(const StepMetrics& m);

struct SftMetrics {
  int step = 0;
  int epoch = 0;
  double loss = 0.0;
};

struct TrainResult {
  Params params;
  std::vector<SftMetrics> sft_metrics;
  std::vector<StepMetrics> rl_metrics;
};

Params initial_params(const TrainConfig& config, int num_options,
                      int feature_dim);

struct TrainHooks {
  std::function<void(const Params&)> on_sft_done;
  std::function<void(const SftMetrics&)> on_sft_step;
  std::function<void(const StepMetrics&)> on_rl_step;
};

// SFT for sft_epochs then RL for rl_steps, starting from `init` if given.
// Hooks observe progress as it happens, so a NumericError thrown mid-run
// leaves every completed step already reported.
TrainResult run_training(const TrainConfig& config,
                         std::span<const TaskPair> pairs,
                         std::optional<Params> init = std::nullopt,
                         const TrainHooks& hooks = {});

}  // namespace dna

#endif  // DNA_TRAINER_HPP_
