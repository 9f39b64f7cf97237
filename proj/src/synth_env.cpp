#include "dna/synth_env.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dna/errors.hpp"

namespace dna {

using nlohmann::json;

bool operator==(const TaskVariant& a, const TaskVariant& b) {
  return a.kind == b.kind && a.gold_option == b.gold_option &&
         a.observation.size() == b.observation.size() &&
         a.observation == b.observation;
}

bool operator==(const TaskPair& a, const TaskPair& b) {
  return a.pair_id == b.pair_id && a.question_id == b.question_id &&
         a.category == b.category && a.num_options == b.num_options &&
         a.real == b.real && a.cf == b.cf;
}

std::vector<std::string> default_categories() {
  return {"Attribute Change", "Causal Reversal", "Counter Physical",
          "Object/Scene Deformation"};
}

void EnvSpec::validate() const {
  if (num_options < 2) {
    throw ConfigError("env: num_options must be >= 2 (a pair needs two "
                      "distinct answers), got " +
                      std::to_string(num_options));
  }
  if (noise_dims < 0) throw ConfigError("env: noise_dims must be >= 0");
  if (num_pairs < 1) throw ConfigError("env: num_pairs must be >= 1");
  for (auto [name, value] : {std::pair{"prior_strength", prior_strength},
                             std::pair{"evidence_strength", evidence_strength},
                             std::pair{"noise_sigma", noise_sigma}}) {
    if (!std::isfinite(value) || value < 0.0) {
      throw ConfigError(std::string("env: ") + name +
                        " must be finite and nonnegative");
    }
  }
  if (categories.empty()) throw ConfigError("env: categories must be nonempty");
}

namespace {

std::string numbered(const char* prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%06zu", prefix, index);
  return buf;
}

Vector render(const EnvSpec& spec, int prior_option, int own_option,
              Rng& rng) {
  const int k = spec.num_options;
  Vector obs = Vector::Zero(spec.feature_dim());
  obs(prior_option) = spec.prior_strength;
  obs(k + own_option) = spec.evidence_strength;
  // Evidence is observed through noise; the extra dims carry noise only.
  for (int j = k; j < obs.size(); ++j) obs(j) += spec.noise_sigma * rng.normal();
  return obs;
}

}  // namespace

TaskPair generate_pair(const EnvSpec& spec, Rng& rng, std::size_t index) {
  spec.validate();
  const auto k = static_cast<std::uint64_t>(spec.num_options);

  TaskPair pair;
  pair.pair_id = numbered("pair", index);
  pair.question_id = numbered("q", index);
  pair.num_options = spec.num_options;
  pair.category = spec.categories[rng.uniform_index(spec.categories.size())];

  const int real_gold = static_cast<int>(rng.uniform_index(k));
  int cf_gold = static_cast<int>(rng.uniform_index(k - 1));
  if (cf_gold >= real_gold) ++cf_gold;

  pair.real.kind = VariantKind::kReal;
  pair.real.gold_option = real_gold;
  pair.real.observation = render(spec, real_gold, real_gold, rng);
  pair.cf.kind = VariantKind::kCounterfactual;
  pair.cf.gold_option = cf_gold;
  pair.cf.observation = render(spec, real_gold, cf_gold, rng);
  return pair;
}

std::vector<TaskPair> generate_dataset(const EnvSpec& spec) {
  spec.validate();
  std::vector<TaskPair> pairs;
  pairs.reserve(static_cast<std::size_t>(spec.num_pairs));
  for (int i = 0; i < spec.num_pairs; ++i) {
    Rng rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(i)}));
    pairs.push_back(generate_pair(spec, rng, static_cast<std::size_t>(i)));
  }
  return pairs;
}

void validate_pair(const TaskPair& pair) {
  const auto fail = [&](const std::string& what) {
    throw DataError("pair '" + pair.pair_id + "': " + what);
  };
  if (pair.num_options < 2) fail("num_options must be >= 2");
  if (pair.real.kind != VariantKind::kReal ||
      pair.cf.kind != VariantKind::kCounterfactual) {
    fail("variant kinds must be (Real, Counterfactual)");
  }
  for (const TaskVariant* v : {&pair.real, &pair.cf}) {
    if (v->gold_option < 0 || v->gold_option >= pair.num_options) {
      fail("gold_option out of range");
    }
    if (v->observation.size() < 2 * pair.num_options) {
      fail("observation shorter than 2 * num_options");
    }
    if (!v->observation.allFinite()) fail("non-finite observation entry");
  }
  if (pair.real.observation.size() != pair.cf.observation.size()) {
    fail("real and cf observations differ in length");
  }
  if (pair.real.gold_option == pair.cf.gold_option) {
    fail("real and cf gold options must differ");
  }
}

namespace {

json encode_variant(const TaskVariant& v) {
  return json{{"gold_option", v.gold_option},
              {"observation", std::vector<double>(v.observation.data(),
                                                  v.observation.data() +
                                                      v.observation.size())}};
}

TaskVariant decode_variant(const json& j, VariantKind kind) {
  TaskVariant v;
  v.kind = kind;
  v.gold_option = j.at("gold_option").get<int>();
  const auto values = j.at("observation").get<std::vector<double>>();
  v.observation = Eigen::Map<const Vector>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
  return v;
}

}  // namespace

std::string encode_pair(const TaskPair& pair) {
  json j{{"pair_id", pair.pair_id},
         {"question_id", pair.question_id},
         {"category", pair.category},
         {"num_options", pair.num_options},
         {"real", encode_variant(pair.real)},
         {"cf", encode_variant(pair.cf)}};
  return j.dump();
}

TaskPair decode_pair(const std::string& line) {
  TaskPair pair;
  try {
    const json j = json::parse(line);
    pair.pair_id = j.at("pair_id").get<std::string>();
    pair.question_id = j.at("question_id").get<std::string>();
    pair.category = j.at("category").get<std::string>();
    pair.num_options = j.at("num_options").get<int>();
    pair.real = decode_variant(j.at("real"), VariantKind::kReal);
    pair.cf = decode_variant(j.at("cf"), VariantKind::kCounterfactual);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed record: ") + e.what());
  }
  validate_pair(pair);
  return pair;
}

void write_dataset(const std::vector<TaskPair>& pairs,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MissingInputError("cannot open for writing: " + path.string());
  for (const auto& pair : pairs) out << encode_pair(pair) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<TaskPair> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open dataset: " + path.string());
  std::vector<TaskPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      pairs.push_back(decode_pair(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    }
    const TaskPair& first = pairs.front();
    const TaskPair& last = pairs.back();
    if (last.num_options != first.num_options ||
        last.feature_dim() != first.feature_dim()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": num_options/observation length differ from line 1");
    }
  }
  return pairs;
}

}  // namespace dna
