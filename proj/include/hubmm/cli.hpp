#ifndef HUBMM_CLI_HPP
#define HUBMM_CLI_HPP

#include "hubmm/linalg.hpp"

#include <filesystem>
#include <iosfwd>

namespace hubmm::cli {

enum ExitCode : int { kOk = 0, kDataError = 1, kSolverError = 2 };

// Entry point behind the `hubmm` executable. Subcommands: hubreg, hubniht,
// denoise, bench fig1. Results go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct RegressionData {
  Vector y;
  DenseMatrix x;
};

// CSV with y in the first column and the predictors after it. A first line
// that does not parse as numbers is treated as a header.
RegressionData read_regression_csv(std::istream& in);
RegressionData read_regression_csv(const std::filesystem::path& path);

} // namespace hubmm::cli

#endif // HUBMM_CLI_HPP
