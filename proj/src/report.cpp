#include "dna/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "dna/errors.hpp"

namespace dna {

namespace {

struct Row {
  int step = 0;
  std::string mode;
  double acc_real = 0, acc_cf = 0, s_real = 0, s_cf = 0, alpha_real = 0,
         alpha_cf = 0, filtered = 0, clip = 0;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::vector<Row> parse_run(const MetricsRun& run) {
  std::stringstream in(run.csv);
  std::string line;
  if (!std::getline(in, line)) throw DataError(run.name + ": empty metrics file");
  const auto header = split(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* needed : {"step", "mode", "acc_real", "acc_cf", "S_R", "S_CF",
                             "alpha_R", "alpha_CF", "filtered_fraction",
                             "clip_fraction"}) {
    if (!col.contains(needed)) {
      throw DataError(run.name + ": missing column '" + needed + "'");
    }
  }
  std::vector<Row> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw DataError(run.name + ":" + std::to_string(line_no) + ": wrong column count");
    }
    try {
      const auto num = [&](const char* c) { return std::stod(cells[col.at(c)]); };
      Row r;
      r.step = std::stoi(cells[col.at("step")]);
      r.mode = cells[col.at("mode")];
      r.acc_real = num("acc_real");
      r.acc_cf = num("acc_cf");
      r.s_real = num("S_R");
      r.s_cf = num("S_CF");
      r.alpha_real = num("alpha_R");
      r.alpha_cf = num("alpha_CF");
      r.filtered = num("filtered_fraction");
      r.clip = num("clip_fraction");
      rows.push_back(std::move(r));
    } catch (const std::exception&) {
      throw DataError(run.name + ":" + std::to_string(line_no) + ": unparseable value");
    }
  }
  return rows;
}

template <typename Fn>
double mean_over(const std::vector<Row>& rows, std::size_t begin, std::size_t end, Fn fn) {
  if (end <= begin) return 0.0;
  double sum = 0.0;
  for (std::size_t i = begin; i < end; ++i) sum += fn(rows[i]);
  return sum / static_cast<double>(end - begin);
}

int mode_rank(const std::string& mode) {
  if (mode == "grpo") return 0;
  if (mode == "dapo") return 1;
  if (mode == "dna") return 2;
  return 3;
}

}  // namespace

Report build_report(const std::vector<MetricsRun>& runs) {
  Report report;
  std::map<std::string, ModeSummary> by_mode;
  char buf[512];
  report.series_csv = "run,mode,step,S_R,S_CF,alpha_R,alpha_CF\n";
  for (const MetricsRun& run : runs) {
    const auto rows = parse_run(run);
    if (rows.empty()) continue;
    const std::size_t n = rows.size();
    const std::size_t tenth = std::max<std::size_t>(1, n / 10);
    ModeSummary& s = by_mode[rows.front().mode];
    s.mode = rows.front().mode;
    ++s.runs;
    s.steps += static_cast<double>(n);
    s.acc_real_final += mean_over(rows, n - tenth, n, [](const Row& r) { return r.acc_real; });
    s.acc_cf_final += mean_over(rows, n - tenth, n, [](const Row& r) { return r.acc_cf; });
    const auto gap = [](const Row& r) { return std::abs(r.s_real - r.s_cf); };
    s.s_gap_first += mean_over(rows, 0, tenth, gap);
    s.s_gap_last += mean_over(rows, n - tenth, n, gap);
    s.filtered_fraction += mean_over(rows, 0, n, [](const Row& r) { return r.filtered; });
    s.clip_fraction += mean_over(rows, 0, n, [](const Row& r) { return r.clip; });
    for (const Row& r : rows) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.10g,%.10g,%.10g,%.10g\n",
                    run.name.c_str(), r.mode.c_str(), r.step, r.s_real, r.s_cf,
                    r.alpha_real, r.alpha_cf);
      report.series_csv += buf;
    }
  }
  for (auto& [mode, s] : by_mode) {
    const double k = s.runs;
    s.steps /= k;
    s.acc_real_final /= k;
    s.acc_cf_final /= k;
    s.s_gap_first /= k;
    s.s_gap_last /= k;
    s.filtered_fraction /= k;
    s.clip_fraction /= k;
    report.modes.push_back(s);
  }
  std::stable_sort(report.modes.begin(), report.modes.end(),
                   [](const ModeSummary& a, const ModeSummary& b) {
                     return mode_rank(a.mode) < mode_rank(b.mode);
                   });

  report.comparison_csv =
      "mode,runs,steps,acc_real_final,acc_cf_final,s_gap_first,s_gap_last,"
      "filtered_fraction,clip_fraction\n";
  std::snprintf(buf, sizeof(buf), "%-6s %4s %6s %10s %10s %10s %10s %9s %9s\n",
                "mode", "runs", "steps", "acc_real", "acc_cf", "gap_first",
                "gap_last", "filtered", "clipped");
  report.text = buf;
  for (const ModeSummary& s : report.modes) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  s.mode.c_str(), s.runs, s.steps, s.acc_real_final, s.acc_cf_final,
                  s.s_gap_first, s.s_gap_last, s.filtered_fraction, s.clip_fraction);
    report.comparison_csv += buf;
    std::snprintf(buf, sizeof(buf), "%-6s %4d %6.0f %10.4f %10.4f %10.4f %10.4f %9.4f %9.4f\n",
                  s.mode.c_str(), s.runs, s.steps, s.acc_real_final, s.acc_cf_final,
                  s.s_gap_first, s.s_gap_last, s.filtered_fraction, s.clip_fraction);
    report.text += buf;
  }
  return report;
}

}  // namespace dna
