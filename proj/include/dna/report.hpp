#ifndef DNA_REPORT_HPP_
#define DNA_REPORT_HPP_

#include <string>
#include <vector>

namespace dna {

struct MetricsRun {
  std::string name;  // usually the CSV path
  std::string csv;   // contents in the trainer's metrics layout
};

struct ModeSummary {
  std::string mode;
  int runs = 0;
  double steps = 0.0;
  double acc_real_final = 0.0;  // mean over the last tenth of each run
  double acc_cf_final = 0.0;
  double s_gap_first = 0.0;     // mean |S_R - S_CF| over the first tenth
  double s_gap_last = 0.0;      // ... and over the last tenth
  double filtered_fraction = 0.0;
  double clip_fraction = 0.0;
};

struct Report {
  std::vector<ModeSummary> modes;  // ordered grpo, dapo, dna, then others
  std::string comparison_csv;
  std::string series_csv;  // run,mode,step,S_R,S_CF,alpha_R,alpha_CF
  std::string text;
};

// Throws DataError on a CSV that does not carry the metrics columns.
Report build_report(const std::vector<MetricsRun>& runs);

}  // namespace dna

#endif  // DNA_REPORT_HPP_
