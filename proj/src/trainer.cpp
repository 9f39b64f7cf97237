#include "dna/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dna/errors.hpp"
#include "dna/parallel.hpp"

namespace dna {

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kSftStream = 0x5F7;
constexpr std::uint64_t kRlBatchStream = 0x4B7C;
constexpr std::uint64_t kRolloutStream = 0x20110;

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kGrpo: return "grpo";
    case Mode::kDapo: return "dapo";
    case Mode::kDna: return "dna";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  if (text == "grpo") return Mode::kGrpo;
  if (text == "dapo") return Mode::kDapo;
  if (text == "dna") return Mode::kDna;
  throw ConfigError("unknown mode '" + std::string(text) +
                    "' (expected grpo, dapo or dna)");
}

void TrainConfig::validate() const {
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("train: " + what);
  };
  require(group_size >= 2, "group_size must be >= 2");
  require(batch_pairs >= 1, "batch_pairs must be >= 1");
  require(eps_low > 0.0 && eps_low < 1.0, "eps_low must lie in (0, 1)");
  require(eps_high > 0.0 && std::isfinite(eps_high), "eps_high must be > 0");
  require(inner_epochs >= 1, "inner_epochs must be >= 1");
  require(learning_rate > 0.0 && std::isfinite(learning_rate),
          "learning_rate must be positive");
  require(sft_learning_rate > 0.0 && std::isfinite(sft_learning_rate),
          "sft_learning_rate must be positive");
  require(sft_epochs >= 0, "sft_epochs must be >= 0");
  require(rl_steps >= 0, "rl_steps must be >= 0");
  require(format_weight >= 0.0 && std::isfinite(format_weight),
          "format_weight must be finite and >= 0");
  require(temperature > 0.0 && std::isfinite(temperature),
          "temperature must be positive for rollouts");
  // The verifier's answer template is exactly three tokens long.
  require(seq_len == 3, "seq_len must be 3 for the answer template");
  require(init_std >= 0.0 && std::isfinite(init_std), "init_std must be >= 0");
  require(workers >= 1, "workers must be >= 1");
}

std::vector<Batch> balanced_batches(std::size_t num_pairs, int batch_pairs,
                                    Rng& rng) {
  if (num_pairs == 0) throw ConfigError("balanced_batches: empty dataset");
  if (batch_pairs < 1 || static_cast<std::size_t>(batch_pairs) > num_pairs) {
    throw ConfigError("batch_pairs (" + std::to_string(batch_pairs) +
                      ") exceeds dataset size (" + std::to_string(num_pairs) +
                      ")");
  }
  std::vector<std::size_t> order(num_pairs);
  for (std::size_t i = 0; i < num_pairs; ++i) order[i] = i;
  // Fisher-Yates on the portable stream (std::shuffle is not portable).
  for (std::size_t i = num_pairs - 1; i > 0; --i) {
    std::swap(order[i], order[rng.uniform_index(i + 1)]);
  }
  const auto per_batch = static_cast<std::size_t>(batch_pairs);
  std::vector<Batch> batches;
  for (std::size_t begin = 0; begin + per_batch <= num_pairs; begin += per_batch) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(begin),
                         order.begin() + static_cast<std::ptrdiff_t>(begin + per_batch));
  }
  return batches;
}

BatchStream::BatchStream(std::size_t num_pairs, int batch_pairs,
                         std::uint64_t seed)
    : num_pairs_(num_pairs), batch_pairs_(batch_pairs), seed_(seed) {
  refill();
}

void BatchStream::refill() {
  Rng rng(derive_seed(seed_, {epoch_}));
  batches_ = balanced_batches(num_pairs_, batch_pairs_, rng);
  cursor_ = 0;
}

const Batch& BatchStream::next() {
  if (cursor_ == batches_.size()) {
    ++epoch_;
    refill();
  }
  return batches_[cursor_++];
}

std::vector<int> sft_target(const TaskVariant& variant, const Vocabulary& vocab) {
  return {vocab.ans_open(), vocab.option(variant.gold_option), vocab.ans_close()};
}

LossAndGrad sft_loss(const Params& params, std::span<const TaskPair> pairs,
                     const Batch& batch) {
  if (batch.empty()) throw std::invalid_argument("sft_loss: empty batch");
  const Vocabulary vocab(params.num_options());
  const double n = 2.0 * static_cast<double>(batch.size());
  const Vector weights = Vector::Constant(params.seq_len(), -1.0 / n);

  LossAndGrad out{0.0, params.zeros_like()};
  for (std::size_t idx : batch) {
    const TaskPair& pair = pairs[idx];
    for (const TaskVariant* v : {&pair.real, &pair.cf}) {
      const auto target = sft_target(*v, vocab);
      out.loss -= sequence_logprob(params, v->observation, target).total_logprob / n;
      accumulate_logprob_grad(params, v->observation, target, weights, out.grad);
    }
  }
  return out;
}

double sft_step(Params& params, std::span<const TaskPair> pairs,
                const Batch& batch, double learning_rate) {
  auto [loss, grad] = sft_loss(params, pairs, batch);
  if (!std::isfinite(loss) || !grad.all_finite()) {
    throw NumericError("sft: non-finite loss or gradient (loss = " +
                       std::to_string(loss) + ")");
  }
  params.flat() -= learning_rate * grad.flat();
  return loss;
}

SurrogateResult dapo_loss(const Params& params, const Params& params_old,
                          std::span<const Entry> entries, double eps_low,
                          double eps_high) {
  if (params_old.flat().size() == 0) {
    throw std::invalid_argument("dapo_loss: missing params_old snapshot");
  }
  if (!params_old.same_shape(params)) {
    throw std::invalid_argument("dapo_loss: params_old shape mismatch");
  }

  std::vector<const Group*> groups;
  for (const Entry& e : entries) {
    for (const Group* g : {&e.real_group, &e.cf_group}) {
      if (!g->filtered && g->num_tokens() > 0) groups.push_back(g);
    }
  }

  SurrogateResult out;
  out.grad = params.zeros_like();
  out.groups = static_cast<int>(groups.size());
  if (groups.empty()) return out;

  const int seq_len = params.seq_len();
  const double lo = 1.0 - eps_low;
  const double hi = 1.0 + eps_high;
  double objective = 0.0;
  Params& grad = out.grad;  // accumulates dJ, negated at the end

  for (const Group* g : groups) {
    const double scale = 1.0 / (static_cast<double>(groups.size()) * g->num_tokens());
    std::vector<Vector> logp(seq_len), logp_old(seq_len);
    for (int t = 0; t < seq_len; ++t) {
      logp[t] = token_log_distribution(params, g->observation, t);
      logp_old[t] = token_log_distribution(params_old, g->observation, t);
    }
    // Per position, the gradient of sum_i w_i log p(tok_i) is
    // (sum_i w_i onehot(tok_i) - (sum_i w_i) p) x^T.
    std::vector<Vector> coef(seq_len, Vector::Zero(params.vocab_size()));
    std::vector<double> mass(seq_len, 0.0);
    for (int i = 0; i < g->size(); ++i) {
      const double adv = g->advantages(i);
      const auto& tokens = g->responses[static_cast<std::size_t>(i)].tokens;
      for (int t = 0; t < seq_len; ++t) {
        const int tok = tokens[static_cast<std::size_t>(t)];
        const double ratio = std::exp(logp[t](tok) - logp_old[t](tok));
        const double unclipped = ratio * adv;
        const double clipped = std::clamp(ratio, lo, hi) * adv;
        ++out.tokens;
        if (unclipped <= clipped) {
          objective += scale * unclipped;
          const double w = scale * adv * ratio;  // d(r A) = A r dlog p
          coef[t](tok) += w;
          mass[t] += w;
        } else {
          objective += scale * clipped;
          ++out.clipped_tokens;
        }
      }
    }
    for (int t = 0; t < seq_len; ++t) {
      if (mass[t] == 0.0 && coef[t].isZero(0.0)) continue;
      const Vector delta = coef[t] - mass[t] * logp[t].array().exp().matrix();
      grad.weight(t).noalias() += delta * g->observation.transpose();
      grad.bias(t) += delta;
    }
  }
  out.loss = -objective;
  grad.flat() = -grad.flat();
  return out;
}

namespace {

Group sample_group(const Params& policy, const TaskVariant& variant,
                   const Vocabulary& vocab, const TrainConfig& config, Rng& rng) {
  std::vector<Response<double>> responses;
  std::vector<RewardBreakdown> rewards;
  responses.reserve(static_cast<std::size_t>(config.group_size));
  rewards.reserve(static_cast<std::size_t>(config.group_size));
  for (int i = 0; i < config.group_size; ++i) {
    responses.push_back(
        sample_response(policy, variant.observation, rng, config.temperature));
    rewards.push_back(
        score(variant, responses.back().tokens, vocab, config.format_weight));
  }
  return make_group(variant.kind, Vector(variant.observation),
                    std::move(responses), std::move(rewards));
}

}  // namespace

RlStepResult rl_step(RlState& state, std::span<const TaskPair> pairs,
                     const Batch& batch, const TrainConfig& config) {
  if (batch.empty()) throw std::invalid_argument("rl_step: empty batch");
  const Params params_old = state.params;
  const Vocabulary vocab(params_old.num_options());
  const auto step_tag = static_cast<std::uint64_t>(state.step);

  // Rollouts: prompt 2k is pair k's real variant, 2k + 1 its counterfactual.
  std::vector<Group> groups(2 * batch.size());
  parallel_for(groups.size(), config.workers, [&](std::size_t prompt) {
    const TaskPair& pair = pairs[batch[prompt / 2]];
    const TaskVariant& variant = prompt % 2 == 0 ? pair.real : pair.cf;
    Rng rng(derive_seed(config.seed, {kRolloutStream, step_tag, prompt}));
    groups[prompt] = sample_group(params_old, variant, vocab, config, rng);
  });

  RlStepResult result;
  StepMetrics& m = result.metrics;
  m.step = state.step;
  m.mode = config.mode;
  result.entries.reserve(batch.size());
  int filtered = 0;
  int real_survivors = 0;
  int cf_survivors = 0;
  int balanced = 0;
  double alpha_real_sum = 0.0;
  double alpha_cf_sum = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    Entry e = build_duality_entry(pairs[batch[k]].pair_id,
                                  std::move(groups[2 * k]),
                                  std::move(groups[2 * k + 1]),
                                  config.entry_options());
    m.acc_real += e.real_group.mean_correctness;
    m.acc_cf += e.cf_group.mean_correctness;
    filtered += (e.real_group.filtered ? 1 : 0) + (e.cf_group.filtered ? 1 : 0);
    if (!e.real_group.filtered) {
      m.s_real += e.s_real;
      ++real_survivors;
    }
    if (!e.cf_group.filtered) {
      m.s_cf += e.s_cf;
      ++cf_survivors;
    }
    if (e.both_survive()) {
      alpha_real_sum += e.alpha_real;
      alpha_cf_sum += e.alpha_cf;
      ++balanced;
    }
    m.single_survivors += e.single_survivor() ? 1 : 0;
    m.scale_skipped += e.scale_skipped ? 1 : 0;
    result.entries.push_back(std::move(e));
  }
  const auto num_pairs = static_cast<double>(batch.size());
  m.acc_real /= num_pairs;
  m.acc_cf /= num_pairs;
  m.s_real = real_survivors > 0 ? m.s_real / real_survivors : 0.0;
  m.s_cf = cf_survivors > 0 ? m.s_cf / cf_survivors : 0.0;
  m.alpha_real = balanced > 0 ? alpha_real_sum / balanced : 1.0;
  m.alpha_cf = balanced > 0 ? alpha_cf_sum / balanced : 1.0;
  m.filtered_fraction = filtered / (2.0 * num_pairs);

  // Advantages stay fixed across inner epochs; only the ratios move.
  int tokens = 0;
  int clipped = 0;
  for (int epoch = 0; epoch < config.inner_epochs; ++epoch) {
    SurrogateResult s = dapo_loss(state.params, params_old, result.entries,
                                  config.eps_low, config.effective_eps_high());
    if (!std::isfinite(s.loss) || !s.grad.all_finite()) {
      throw NumericError("rl: non-finite loss or gradient at step " +
                         std::to_string(state.step));
    }
    m.loss += s.loss / config.inner_epochs;
    m.grad_norm += s.grad.flat().norm() / config.inner_epochs;
    tokens += s.tokens;
    clipped += s.clipped_tokens;
    state.params.flat() -= config.learning_rate * s.grad.flat();
  }
  m.clip_fraction = tokens > 0 ? static_cast<double>(clipped) / tokens : 0.0;
  ++state.step;
  return result;
}

std::string metrics_csv_header() {
  return "step,mode,loss,acc_real,acc_cf,S_R,S_CF,alpha_R,alpha_CF,"
         "filtered_fraction,clip_fraction,grad_norm\n";
}

std::string metrics_csv_row(const StepMetrics& m) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%d,%s,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                m.step, std::string(to_string(m.mode)).c_str(), m.loss,
                m.acc_real, m.acc_cf, m.s_real, m.s_cf, m.alpha_real,
                m.alpha_cf, m.filtered_fraction, m.clip_fraction, m.grad_norm);
  return buf;
}

Params initial_params(const TrainConfig& config, int num_options,
                      int feature_dim) {
  const int vocab = Vocabulary(num_options).size();
  if (config.init_std == 0.0) return Params(config.seq_len, vocab, feature_dim);
  Rng rng(derive_seed(config.seed, {kInitStream}));
  return Params::gaussian(config.seq_len, vocab, feature_dim, config.init_std, rng);
}

TrainResult run_training(const TrainConfig& config,
                         std::span<const TaskPair> pairs,
                         std::optional<Params> init,
                         const TrainHooks& hooks) {
  config.validate();
  if (pairs.empty()) throw ConfigError("training dataset is empty");
  const int num_options = pairs.front().num_options;
  const int feature_dim = pairs.front().feature_dim();

  TrainResult result;
  result.params = init ? std::move(*init)
                       : initial_params(config, num_options, feature_dim);
  if (result.params.num_options() != num_options ||
      result.params.feature_dim() != feature_dim ||
      result.params.seq_len() != config.seq_len) {
    throw ConfigError("initial checkpoint does not match dataset shape");
  }

  if (config.sft_epochs > 0) {
    int step = 0;
    for (int epoch = 0; epoch < config.sft_epochs; ++epoch) {
      Rng rng(derive_seed(config.seed, {kSftStream, static_cast<std::uint64_t>(epoch)}));
      for (const Batch& batch : balanced_batches(pairs.size(), config.batch_pairs, rng)) {
        double loss;
        try {
          loss = sft_step(result.params, pairs, batch, config.sft_learning_rate);
        } catch (const NumericError& e) {
          throw NumericError(std::string(e.what()) + " (sft step " +
                             std::to_string(step) + ")");
        }
        result.sft_metrics.push_back({step++, epoch, loss});
        if (hooks.on_sft_step) hooks.on_sft_step(result.sft_metrics.back());
      }
    }
  }
  if (hooks.on_sft_done) hooks.on_sft_done(result.params);

  RlState state{std::move(result.params), 0};
  BatchStream stream(pairs.size(), config.batch_pairs,
                     derive_seed(config.seed, {kRlBatchStream}));
  for (int s = 0; s < config.rl_steps; ++s) {
    result.rl_metrics.push_back(rl_step(state, pairs, stream.next(), config).metrics);
    if (hooks.on_rl_step) hooks.on_rl_step(result.rl_metrics.back());
  }
  result.params = std::move(state.params);
  return result;
}

}  // namespace dna
