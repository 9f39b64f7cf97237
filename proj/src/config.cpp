#include "dna/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "dna/errors.hpp"

namespace dna {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
  }
  return value;
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += "; ";
    out += items[i];
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    const auto i32 = [](auto field) -> Setter {
      return [field](RunConfig& c, const std::string& k, const std::string& v) {
        field(c) = parse_number<int>(k, v);
      };
    };
    const auto f64 = [](auto field) -> Setter {
      return [field](RunConfig& c, const std::string& k, const std::string& v) {
        field(c) = parse_number<double>(k, v);
      };
    };
    t["env.num_options"] = i32([](RunConfig& c) -> int& { return c.env.num_options; });
    t["env.noise_dims"] = i32([](RunConfig& c) -> int& { return c.env.noise_dims; });
    t["env.num_pairs"] = i32([](RunConfig& c) -> int& { return c.env.num_pairs; });
    t["env.prior_strength"] = f64([](RunConfig& c) -> double& { return c.env.prior_strength; });
    t["env.evidence_strength"] = f64([](RunConfig& c) -> double& { return c.env.evidence_strength; });
    t["env.noise_sigma"] = f64([](RunConfig& c) -> double& { return c.env.noise_sigma; });
    t["env.categories"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.env.categories = split_list(v);
    };
    t["train.mode"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.train.mode = parse_mode(v);
    };
    t["train.group_size"] = i32([](RunConfig& c) -> int& { return c.train.group_size; });
    t["train.batch_pairs"] = i32([](RunConfig& c) -> int& { return c.train.batch_pairs; });
    t["train.inner_epochs"] = i32([](RunConfig& c) -> int& { return c.train.inner_epochs; });
    t["train.sft_epochs"] = i32([](RunConfig& c) -> int& { return c.train.sft_epochs; });
    t["train.rl_steps"] = i32([](RunConfig& c) -> int& { return c.train.rl_steps; });
    t["train.seq_len"] = i32([](RunConfig& c) -> int& { return c.train.seq_len; });
    t["train.eps_low"] = f64([](RunConfig& c) -> double& { return c.train.eps_low; });
    t["train.eps_high"] = f64([](RunConfig& c) -> double& { return c.train.eps_high; });
    t["train.learning_rate"] = f64([](RunConfig& c) -> double& { return c.train.learning_rate; });
    t["train.sft_learning_rate"] = f64([](RunConfig& c) -> double& { return c.train.sft_learning_rate; });
    t["train.format_weight"] = f64([](RunConfig& c) -> double& { return c.train.format_weight; });
    t["train.temperature"] = f64([](RunConfig& c) -> double& { return c.train.temperature; });
    t["train.init_std"] = f64([](RunConfig& c) -> double& { return c.train.init_std; });
    t["eval.temperature"] = f64([](RunConfig& c) -> double& { return c.eval.temperature; });
    t["eval.seed"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.eval.seed = parse_number<std::uint64_t>(k, v);
    };
    t["run.seed"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.seed = parse_number<std::uint64_t>(k, v);
    };
    t["run.workers"] = i32([](RunConfig& c) -> int& { return c.workers; });
    t["run.out_dir"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.out_dir = v;
    };
    return t;
  }();
  return table;
}

}  // namespace

void RunConfig::set(const std::string& dotted_key, const std::string& value) {
  const auto it = setters().find(dotted_key);
  if (it == setters().end()) {
    throw ConfigError("config: unknown key '" + dotted_key + "'");
  }
  it->second(*this, dotted_key, trim(value));
}

void RunConfig::finalize() {
  env.seed = seed;
  train.seed = seed;
  train.workers = workers;
  eval.workers = workers;
  if (workers < 1) throw ConfigError("run: workers must be >= 1");
  if (!(eval.temperature >= 0.0)) throw ConfigError("eval: temperature must be >= 0");
  env.validate();
  train.validate();
}

std::map<std::string, std::string> RunConfig::to_map() const {
  std::map<std::string, std::string> m;
  m["env.num_options"] = std::to_string(env.num_options);
  m["env.noise_dims"] = std::to_string(env.noise_dims);
  m["env.num_pairs"] = std::to_string(env.num_pairs);
  m["env.prior_strength"] = fmt(env.prior_strength);
  m["env.evidence_strength"] = fmt(env.evidence_strength);
  m["env.noise_sigma"] = fmt(env.noise_sigma);
  m["env.categories"] = join_list(env.categories);
  m["train.mode"] = std::string(to_string(train.mode));
  m["train.group_size"] = std::to_string(train.group_size);
  m["train.batch_pairs"] = std::to_string(train.batch_pairs);
  m["train.inner_epochs"] = std::to_string(train.inner_epochs);
  m["train.sft_epochs"] = std::to_string(train.sft_epochs);
  m["train.rl_steps"] = std::to_string(train.rl_steps);
  m["train.seq_len"] = std::to_string(train.seq_len);
  m["train.eps_low"] = fmt(train.eps_low);
  m["train.eps_high"] = fmt(train.eps_high);
  m["train.learning_rate"] = fmt(train.learning_rate);
  m["train.sft_learning_rate"] = fmt(train.sft_learning_rate);
  m["train.format_weight"] = fmt(train.format_weight);
  m["train.temperature"] = fmt(train.temperature);
  m["train.init_std"] = fmt(train.init_std);
  m["eval.temperature"] = fmt(eval.temperature);
  m["eval.seed"] = std::to_string(eval.seed);
  m["run.seed"] = std::to_string(seed);
  m["run.workers"] = std::to_string(workers);
  m["run.out_dir"] = out_dir.string();
  return m;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig config;
  std::stringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "env" && section != "train" && section != "eval" && section != "run") {
        throw ConfigError(where + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside of any section");
    try {
      config.set(section + "." + trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open config: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

}  // namespace dna
