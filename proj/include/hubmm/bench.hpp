#ifndef HUBMM_BENCH_HPP
#define HUBMM_BENCH_HPP

// Monte-Carlo comparison of least squares and Huber's joint estimates under
// sign-flip contamination of the responses.
//
// Random streams: every trial owns an std::mt19937_64 seeded with
// trial_seed(master_seed, eps_index, trial_index), which feeds std::seed_seq
// with {low32(master), high32(master), eps_index, trial_index}. Draw order
// inside a trial: X (row by row), beta, e, then N uniforms deciding the
// flips. The uniforms are drawn for every eps, so two trials with the same
// seed differ only in which responses are flipped.

#include "hubmm/format.hpp"
#include "hubmm/hubreg.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hubmm {

// Divisor of the residual sum of squares for the least-squares scale.
enum class SdDivisor { N, NMinusP };

struct ExperimentConfig {
  long n = 500;
  long p = 250;
  double snr_db = 20.0;
  double c = kHuberC95;
  std::vector<double> eps_grid = default_eps_grid();
  int trials = 200;
  std::uint64_t master_seed = 42;
  // Scale alpha by (n - p)/n in the Huber fit.
  bool dof_correction = true;
  SdDivisor sd_divisor = SdDivisor::NMinusP;
  double tol = 1e-6;
  int max_iter = 500;
  unsigned threads = 1;

  static std::vector<double> default_eps_grid(); // 0, 0.01, ..., 0.10
  void validate() const;
};

inline constexpr const char* kGeneratorName = "mt19937_64/seed_seq(master_lo,master_hi,eps_index,trial_index)";

struct Trial {
  RegressionProblem problem;
  Vector beta_true;
  double sigma_true;
  Vector noise;              // standardized errors e
  std::vector<bool> flipped; // responses whose sign was changed
};

struct TrialOutcome {
  double eps = 0.0;
  int trial = 0;
  double beta_nmse_lse = 0.0; // ||b - beta||^2 / ||beta||^2
  double beta_nmse_hub = 0.0;
  double scale_err_sd = 0.0;  // log10(s / sigma)^2
  double scale_err_hub = 0.0;
};

struct ResultRow {
  double eps = 0.0;
  double lse_beta_nmse = 0.0;
  double hub_beta_nmse = 0.0;
  double sd_scale_err = 0.0;
  double hub_scale_err = 0.0;
  int trials = 0;
  int failures = 0;
};

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t eps_index, std::size_t trial_index);

Trial generate_trial(const ExperimentConfig& cfg, double eps, std::uint64_t seed);

TrialOutcome run_trial(const ExperimentConfig& cfg, double eps, std::uint64_t seed);

// Means over successful trials for every eps. Progress lines go to
// `progress` when it is non-null.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

inline constexpr const char* kCsvHeader =
    "eps,lse_beta_nmse,hub_beta_nmse,sd_scale_err,hub_scale_err,trials,failures";

void write_csv(std::ostream& out, const std::vector<ResultRow>& table);
void write_csv(const std::filesystem::path& path, const std::vector<ResultRow>& table);

} // namespace hubmm

#endif // HUBMM_BENCH_HPP
