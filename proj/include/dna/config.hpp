#ifndef DNA_CONFIG_HPP_
#define DNA_CONFIG_HPP_

#include <filesystem>
#include <map>
#include <string>

#include "dna/eval.hpp"
#include "dna/synth_env.hpp"
#include "dna/trainer.hpp"

namespace dna {

// Everything a command needs, loaded from one INI-style file:
//
//   # comment
//   [env]    num_options, noise_dims, prior_strength, evidence_strength,
//            noise_sigma, num_pairs, categories (';'-separated)
//   [train]  mode, group_size, batch_pairs, eps_low, eps_high, inner_epochs,
//            learning_rate, sft_learning_rate, sft_epochs, rl_steps,
//            format_weight, temperature, seq_len, init_std
//   [eval]   temperature, seed
//   [run]    seed, workers, out_dir
//
// run.seed feeds both the generator and the trainer. Unknown sections or keys
// are rejected.
struct RunConfig {
  EnvSpec env;
  TrainConfig train;
  EvalOptions eval;
  std::uint64_t seed = 1;
  int workers = 1;
  std::filesystem::path out_dir = "out";

  // Assigns "section.key" from its textual value. Throws ConfigError.
  void set(const std::string& dotted_key, const std::string& value);
  // Pushes seed/workers into the module configs and validates them all.
  void finalize();
  // Flat "section.key" -> value echo, suitable for manifests.
  std::map<std::string, std::string> to_map() const;
};

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace dna

#endif  // DNA_CONFIG_HPP_
