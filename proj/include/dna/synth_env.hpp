#ifndef DNA_SYNTH_ENV_HPP_
#define DNA_SYNTH_ENV_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dna/rng.hpp"
#include "dna/types.hpp"

namespace dna {

enum class VariantKind { kReal, kCounterfactual };

// One rendering of a shared question. The observation is laid out as
//   [ prior block (K) | evidence block (K) | noise (d_noise) ].
struct TaskVariant {
  VariantKind kind = VariantKind::kReal;
  int gold_option = 0;
  Vector observation;
};

struct TaskPair {
  std::string pair_id;
  std::string question_id;
  std::string category;
  int num_options = 0;
  TaskVariant real;
  TaskVariant cf;

  int feature_dim() const { return static_cast<int>(real.observation.size()); }
};

bool operator==(const TaskVariant& a, const TaskVariant& b);
bool operator==(const TaskPair& a, const TaskPair& b);

std::vector<std::string> default_categories();

struct EnvSpec {
  int num_options = 4;
  int noise_dims = 8;
  double prior_strength = 1.0;
  double evidence_strength = 0.6;
  double noise_sigma = 0.3;
  int num_pairs = 2000;
  std::uint64_t seed = 1;
  std::vector<std::string> categories = default_categories();

  int feature_dim() const { return 2 * num_options + noise_dims; }

  // Throws ConfigError on any invalid field.
  void validate() const;
};

// Observation block views.
inline auto prior_block(const Vector& obs, int num_options) {
  return obs.segment(0, num_options);
}
inline auto evidence_block(const Vector& obs, int num_options) {
  return obs.segment(num_options, num_options);
}
inline auto noise_block(const Vector& obs, int num_options) {
  return obs.tail(obs.size() - 2 * num_options);
}

// Builds pair `index` from the stream. Both variants share the noise-free
// prior block, which points at the real gold option. Each evidence block
// points at the variant's own gold option and, like the trailing noise dims,
// is perturbed by N(0, noise_sigma^2) drawn independently per variant.
TaskPair generate_pair(const EnvSpec& spec, Rng& rng, std::size_t index = 0);

// Pair i is drawn from its own stream derive_seed(spec.seed, {i}), so the
// dataset is a pure function of the EnvSpec and pairs may be built in any order.
std::vector<TaskPair> generate_dataset(const EnvSpec& spec);

// Checks the TaskPair/TaskVariant invariants; throws DataError.
void validate_pair(const TaskPair& pair);

void write_dataset(const std::vector<TaskPair>& pairs,
                   const std::filesystem::path& path);
std::vector<TaskPair> read_dataset(const std::filesystem::path& path);

// JSONL line codec, exposed for tests.
std::string encode_pair(const TaskPair& pair);
TaskPair decode_pair(const std::string& line);

}  // namespace dna

#endif  // DNA_SYNTH_ENV_HPP_
