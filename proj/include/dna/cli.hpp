#ifndef DNA_CLI_HPP_
#define DNA_CLI_HPP_

#include <ostream>

namespace dna {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitMissingInput = 3;
inline constexpr int kExitNumeric = 4;

// Entry point for the dnatrain tool: gen-data, sft, train, eval, report.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace dna

#endif  // DNA_CLI_HPP_
