#include "dna/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "dna/errors.hpp"
#include "dna/parallel.hpp"
#include "dna/reward.hpp"

namespace dna {

std::vector<PairResult> evaluate(const PolicyParams<double>& params,
                                 std::span<const TaskPair> pairs,
                                 const EvalOptions& options) {
  for (const TaskPair& pair : pairs) {
    if (pair.num_options != params.num_options() ||
        pair.feature_dim() != params.feature_dim()) {
      throw ConfigError("checkpoint expects K=" +
                        std::to_string(params.num_options()) + ", d=" +
                        std::to_string(params.feature_dim()) + " but pair '" +
                        pair.pair_id + "' has K=" +
                        std::to_string(pair.num_options) + ", d=" +
                        std::to_string(pair.feature_dim()));
    }
  }
  const Vocabulary vocab(params.num_options());
  std::vector<PairResult> results(pairs.size());
  parallel_for(pairs.size(), options.workers, [&](std::size_t i) {
    const TaskPair& pair = pairs[i];
    Rng rng(derive_seed(options.seed, {i}));
    const auto correct = [&](const TaskVariant& v) {
      const auto r = sample_response(params, v.observation, rng, options.temperature);
      return score(v, r.tokens, vocab, 0.0).correct();
    };
    PairResult& out = results[i];
    out.pair_id = pair.pair_id;
    out.category = pair.category;
    out.real_correct = correct(pair.real);
    out.cf_correct = correct(pair.cf);
    out.both = out.real_correct && out.cf_correct;
  });
  std::stable_sort(results.begin(), results.end(),
                   [](const PairResult& a, const PairResult& b) {
                     return a.pair_id < b.pair_id;
                   });
  return results;
}

namespace {

struct Counts {
  int n = 0;
  int real = 0;
  int cf = 0;
  int both = 0;

  void add(const PairResult& r) {
    ++n;
    real += r.real_correct;
    cf += r.cf_correct;
    both += r.real_correct && r.cf_correct;
  }

  MetricRow row(std::string category) const {
    const double scale = n > 0 ? 100.0 / n : 0.0;
    return {std::move(category), n, real * scale, cf * scale, both * scale};
  }
};

}  // namespace

MetricTable aggregate(std::span<const PairResult> results) {
  std::map<std::string, Counts> by_category;
  Counts overall;
  for (const PairResult& r : results) {
    by_category[r.category].add(r);
    overall.add(r);
  }
  MetricTable table;
  for (const auto& [category, counts] : by_category) {
    table.categories.push_back(counts.row(category));
  }
  table.overall = overall.row("Overall");
  return table;
}

std::string report_csv(const MetricTable& table) {
  std::string out = "category,n,acc_real,acc_cf,acc_both\n";
  char buf[256];
  const auto emit = [&](const MetricRow& r) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.1f,%.1f,%.1f\n", r.category.c_str(),
                  r.n, r.acc_real, r.acc_cf, r.acc_both);
    out += buf;
  };
  for (const auto& r : table.categories) emit(r);
  emit(table.overall);
  return out;
}

std::string report_text(const MetricTable& table) {
  std::size_t width = std::string("Overall").size();
  for (const auto& r : table.categories) width = std::max(width, r.category.size());
  const int w = static_cast<int>(width);
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%-*s  %6s  %6s  %6s  %6s\n", w, "Category",
                "n", "Real", "CF", "Both");
  out += buf;
  out += std::string(width + 34, '-') + "\n";
  const auto emit = [&](const MetricRow& r) {
    std::snprintf(buf, sizeof(buf), "%-*s  %6d  %6.1f  %6.1f  %6.1f\n", w,
                  r.category.c_str(), r.n, r.acc_real, r.acc_cf, r.acc_both);
    out += buf;
  };
  for (const auto& r : table.categories) emit(r);
  out += std::string(width + 34, '-') + "\n";
  emit(table.overall);
  return out;
}

std::string pair_results_csv(std::span<const PairResult> results) {
  std::string out = "pair_id,category,real_correct,cf_correct,both\n";
  for (const auto& r : results) {
    out += r.pair_id + "," + r.category + "," + (r.real_correct ? "1" : "0") +
           "," + (r.cf_correct ? "1" : "0") + "," + (r.both ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace dna
