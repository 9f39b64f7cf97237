#ifndef DNA_EVAL_HPP_
#define DNA_EVAL_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dna/policy.hpp"
#include "dna/synth_env.hpp"

namespace dna {

struct PairResult {
  std::string pair_id;
  std::string category;
  bool real_correct = false;
  bool cf_correct = false;
  bool both = false;
};

struct EvalOptions {
  double temperature = 0.0;  // 0 = greedy; > 0 samples for Monte Carlo checks
  std::uint64_t seed = 0;    // only used when temperature > 0
  int workers = 1;
};

// Decodes one response per variant, grades it with the verifier and returns
// results ordered by pair_id. Throws ConfigError if the checkpoint's K or
// feature dimension disagrees with the dataset.
std::vector<PairResult> evaluate(const PolicyParams<double>& params,
                                 std::span<const TaskPair> pairs,
                                 const EvalOptions& options = {});

struct MetricRow {
  std::string category;
  int n = 0;
  double acc_real = 0.0;  // percentages
  double acc_cf = 0.0;
  double acc_both = 0.0;
};

struct MetricTable {
  std::vector<MetricRow> categories;  // sorted by category name
  MetricRow overall;
};

MetricTable aggregate(std::span<const PairResult> results);

// CSV: category,n,acc_real,acc_cf,acc_both with one-decimal percentages;
// category rows then an "Overall" row.
std::string report_csv(const MetricTable& table);
// Aligned plain-text rendering of the same table.
std::string report_text(const MetricTable& table);
// Per-pair CSV: pair_id,category,real_correct,cf_correct,both.
std::string pair_results_csv(std::span<const PairResult> results);

}  // namespace dna

#endif  // DNA_EVAL_HPP_
