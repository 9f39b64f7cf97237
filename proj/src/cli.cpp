#include "dna/cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dna/artifacts.hpp"
#include "dna/checkpoint.hpp"
#include "dna/config.hpp"
#include "dna/errors.hpp"
#include "dna/eval.hpp"
#include "dna/report.hpp"
#include "dna/trainer.hpp"

namespace dna {

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> mode;
  std::optional<int> workers;
  std::vector<std::string> overrides;
  bool force = false;
};

struct CommandOptions {
  std::string output = "dataset.jsonl";
  std::string dataset;
  std::string checkpoint;
  std::string init;
  std::vector<std::string> metrics;
};

void add_common(CLI::App* cmd, CommonOptions& c) {
  cmd->add_option("--config", c.config_path, "Config file (INI-style sections)");
  cmd->add_option("--seed", c.seed, "Seed for generation, training and sampling");
  cmd->add_option("--out", c.out_dir, "Output directory");
  cmd->add_option("--mode", c.mode, "RL mode")->check(CLI::IsMember({"grpo", "dapo", "dna"}));
  cmd->add_option("--workers", c.workers, "Worker threads (1 = strict single-threaded)");
  cmd->add_option("--set", c.overrides, "Override a config key: section.key=value");
  cmd->add_flag("--force", c.force, "Replace existing outputs");
}

RunConfig resolve_config(const CommonOptions& c) {
  RunConfig cfg = c.config_path.empty() ? RunConfig{} : load_config(c.config_path);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) cfg.seed = *c.seed;
  if (c.out_dir) cfg.out_dir = *c.out_dir;
  if (c.mode) cfg.train.mode = parse_mode(*c.mode);
  if (c.workers) cfg.workers = *c.workers;
  cfg.finalize();
  return cfg;
}

void require_file(const std::string& path, const char* role) {
  if (path.empty()) throw MissingInputError(std::string("missing required input: --") + role);
  if (!std::filesystem::is_regular_file(path)) {
    throw MissingInputError(std::string(role) + " not found: " + path);
  }
}

Manifest make_manifest(const std::string& command, const RunConfig& cfg) {
  Manifest m;
  m.command = command;
  m.config = cfg.to_map();
  m.seed = cfg.seed;
  return m;
}

std::string sft_metrics_csv(const std::vector<SftMetrics>& rows) {
  std::string out = "step,epoch,loss\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.10g\n", r.step, r.epoch, r.loss);
    out += buf;
  }
  return out;
}

int cmd_gen_data(const RunConfig& cfg, const CommandOptions& o, bool force,
                 std::ostream& out) {
  const RunDir dir(cfg.out_dir, force);
  const std::string manifest_name = "gen-data_manifest.json";
  dir.claim({o.output, manifest_name});
  const auto pairs = generate_dataset(cfg.env);
  std::filesystem::create_directories(dir.dir());
  write_dataset(pairs, dir.path(o.output));

  Manifest m = make_manifest("gen-data", cfg);
  m.dataset_sha256 = sha256_file(dir.path(o.output));
  m.artifacts = {o.output};
  dir.write_text(manifest_name, m.to_json(dir));
  out << "pairs: " << pairs.size() << "\n"
      << "dataset: " << dir.path(o.output).string() << "\n"
      << "sha256: " << m.dataset_sha256 << "\n";
  return kExitOk;
}

int cmd_train(RunConfig cfg, const CommandOptions& o, bool force, bool sft_only,
              std::ostream& out, std::ostream& err) {
  require_file(o.dataset, "dataset");
  if (!o.init.empty()) require_file(o.init, "init");
  const RunDir dir(cfg.out_dir, force);
  const std::string command = sft_only ? "sft" : "train";
  std::vector<std::string> artifacts = {"sft.ckpt", "sft_metrics.csv"};
  if (!sft_only) artifacts.insert(artifacts.end(), {"metrics.csv", "final.ckpt"});
  const std::string manifest_name = command + "_manifest.json";
  std::vector<std::string> claimed = artifacts;
  claimed.push_back(manifest_name);
  dir.claim(claimed);

  if (sft_only) cfg.train.rl_steps = 0;
  const auto pairs = read_dataset(o.dataset);
  if (pairs.empty()) throw DataError("dataset is empty: " + o.dataset);
  Manifest m = make_manifest(command, cfg);
  m.dataset_sha256 = sha256_file(o.dataset);
  m.inputs["dataset"] = o.dataset;

  std::optional<Params> init;
  if (!o.init.empty()) {
    init = load_checkpoint(o.init);
    m.inputs["init"] = o.init;
    const auto recorded = recorded_dataset_sha(o.init);
    if (!recorded.empty() && recorded != m.dataset_sha256) {
      err << "warning: " << o.init << " was trained on a different dataset (sha256 "
          << recorded << ")\n";
    }
  }

  std::filesystem::create_directories(dir.dir());
  std::ofstream metrics;
  if (!sft_only) {
    metrics.open(dir.path("metrics.csv"), std::ios::binary | std::ios::trunc);
    metrics << metrics_csv_header() << std::flush;
  }
  std::vector<SftMetrics> sft_rows;
  TrainHooks hooks;
  hooks.on_sft_step = [&](const SftMetrics& s) { sft_rows.push_back(s); };
  hooks.on_sft_done = [&](const Params& p) {
    save_checkpoint(p, dir.path("sft.ckpt"));
    dir.write_text("sft_metrics.csv", sft_metrics_csv(sft_rows));
  };
  hooks.on_rl_step = [&](const StepMetrics& s) { metrics << metrics_csv_row(s) << std::flush; };

  const TrainResult result = run_training(cfg.train, pairs, std::move(init), hooks);
  if (!sft_only) {
    metrics.close();
    save_checkpoint(result.params, dir.path("final.ckpt"));
  }
  m.artifacts = artifacts;
  dir.write_text(manifest_name, m.to_json(dir));

  out << command << ": " << result.sft_metrics.size() << " sft steps";
  if (!result.sft_metrics.empty()) {
    out << " (loss " << result.sft_metrics.front().loss << " -> "
        << result.sft_metrics.back().loss << ")";
  }
  if (!sft_only) {
    out << ", " << result.rl_metrics.size() << " rl steps (" << to_string(cfg.train.mode) << ")";
  }
  out << "\nwrote " << dir.dir().string() << "\n";
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, const CommandOptions& o, bool force,
             std::ostream& out, std::ostream& err) {
  require_file(o.checkpoint, "checkpoint");
  require_file(o.dataset, "dataset");
  const RunDir dir(cfg.out_dir, force);
  const std::vector<std::string> artifacts = {"eval_report.csv", "eval_report.txt",
                                              "eval_pairs.csv"};
  std::vector<std::string> claimed = artifacts;
  claimed.push_back("eval_manifest.json");
  dir.claim(claimed);

  const auto params = load_checkpoint(o.checkpoint);
  const auto pairs = read_dataset(o.dataset);
  if (pairs.empty()) throw DataError("dataset is empty: " + o.dataset);
  Manifest m = make_manifest("eval", cfg);
  m.dataset_sha256 = sha256_file(o.dataset);
  m.inputs = {{"checkpoint", o.checkpoint}, {"dataset", o.dataset}};
  if (recorded_dataset_sha(o.checkpoint) == m.dataset_sha256) {
    err << "warning: evaluating on the dataset the checkpoint was trained on\n";
  }

  const auto results = evaluate(params, pairs, cfg.eval);
  const auto table = aggregate(results);
  dir.write_text("eval_report.csv", report_csv(table));
  dir.write_text("eval_report.txt", report_text(table));
  dir.write_text("eval_pairs.csv", pair_results_csv(results));
  m.artifacts = artifacts;
  dir.write_text("eval_manifest.json", m.to_json(dir));
  out << report_text(table);
  return kExitOk;
}

int cmd_report(const RunConfig& cfg, const CommandOptions& o, bool force,
               std::ostream& out) {
  if (o.metrics.empty()) throw MissingInputError("missing required input: --metrics");
  std::vector<MetricsRun> runs;
  for (const auto& path : o.metrics) {
    require_file(path, "metrics");
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    runs.push_back({path, ss.str()});
  }
  const RunDir dir(cfg.out_dir, force);
  const std::vector<std::string> artifacts = {"report_comparison.csv",
                                              "report_series.csv", "report.txt"};
  std::vector<std::string> claimed = artifacts;
  claimed.push_back("report_manifest.json");
  dir.claim(claimed);

  const Report report = build_report(runs);
  dir.write_text("report_comparison.csv", report.comparison_csv);
  dir.write_text("report_series.csv", report.series_csv);
  dir.write_text("report.txt", report.text);
  Manifest m = make_manifest("report", cfg);
  for (std::size_t i = 0; i < o.metrics.size(); ++i) {
    m.inputs["metrics_" + std::to_string(i)] = o.metrics[i];
  }
  m.artifacts = artifacts;
  dir.write_text("report_manifest.json", m.to_json(dir));
  out << report.text;
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Duality-normalized advantage training bench"};
  app.require_subcommand(1);
  CommonOptions common;
  CommandOptions opts;

  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic paired dataset");
  add_common(gen, common);
  gen->add_option("--output", opts.output, "Dataset file name inside --out");

  auto* sft = app.add_subcommand("sft", "Supervised fine-tuning only");
  add_common(sft, common);
  sft->add_option("--dataset", opts.dataset, "Training dataset (JSONL)");
  sft->add_option("--init", opts.init, "Initial checkpoint");

  auto* train = app.add_subcommand("train", "SFT followed by RL");
  add_common(train, common);
  train->add_option("--dataset", opts.dataset, "Training dataset (JSONL)");
  train->add_option("--init", opts.init, "Initial checkpoint (e.g. an SFT checkpoint)");

  auto* eval = app.add_subcommand("eval", "Greedy paired evaluation");
  add_common(eval, common);
  eval->add_option("--checkpoint", opts.checkpoint, "Policy checkpoint");
  eval->add_option("--dataset", opts.dataset, "Evaluation dataset (JSONL)");

  auto* report = app.add_subcommand("report", "Compare metrics CSVs across modes");
  add_common(report, common);
  report->add_option("--metrics", opts.metrics, "Metrics CSVs from train runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const RunConfig cfg = resolve_config(common);
    if (gen->parsed()) return cmd_gen_data(cfg, opts, common.force, out);
    if (sft->parsed()) return cmd_train(cfg, opts, common.force, true, out, err);
    if (train->parsed()) return cmd_train(cfg, opts, common.force, false, out, err);
    if (eval->parsed()) return cmd_eval(cfg, opts, common.force, out, err);
    if (report->parsed()) return cmd_report(cfg, opts, common.force, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MissingInputError& e) {
    err << "missing input: " << e.what() << "\n";
    return kExitMissingInput;
  } catch (const DataError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitMissingInput;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}

}  // namespace dna
