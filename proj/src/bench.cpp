#include "hubmm/bench.hpp"

#include "hubmm/errors.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

namespace hubmm {

std::vector<double> ExperimentConfig::default_eps_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i)
    grid.push_back(i / 100.0);
  return grid;
}

void ExperimentConfig::validate() const {
  if (n < 2 || p < 1 || p >= n)
    throw std::invalid_argument("experiment needs 1 <= p < n");
  if (!std::isfinite(snr_db))
    throw std::invalid_argument("SNR must be finite");
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("threshold c must be positive and finite");
  if (eps_grid.empty())
    throw std::invalid_argument("empty contamination grid");
  for (double e : eps_grid)
    if (!(e >= 0.0 && e <= 1.0))
      throw std::invalid_argument("contamination probability outside [0, 1]");
  if (trials < 1)
    throw std::invalid_argument("trials must be at least 1");
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t eps_index, std::size_t trial_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(eps_index), static_cast<std::uint32_t>(trial_index)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (std::uint64_t{words[1]} << 32) | words[0];
}

Trial generate_trial(const ExperimentConfig& cfg, double eps, std::uint64_t seed) {
  cfg.validate();
  if (!(eps >= 0.0 && eps <= 1.0))
    throw std::invalid_argument("contamination probability outside [0, 1]");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  DenseMatrix x(cfg.n, cfg.p);
  for (long i = 0; i < cfg.n; ++i)
    for (long j = 0; j < cfg.p; ++j)
      x(i, j) = normal(gen);
  Vector beta(cfg.p);
  for (auto& b : beta)
    b = normal(gen);
  Vector e(cfg.n);
  for (auto& v : e)
    v = normal(gen);

  const Vector signal = x * beta;
  const double snr = std::pow(10.0, cfg.snr_db / 10.0);
  const double sigma = std::sqrt(signal.squaredNorm() / (static_cast<double>(cfg.n) * snr));
  Vector y = signal + sigma * e;

  std::vector<bool> flipped(static_cast<std::size_t>(cfg.n));
  for (long i = 0; i < cfg.n; ++i) {
    const bool flip = uniform(gen) < eps;
    flipped[static_cast<std::size_t>(i)] = flip;
    if (flip)
      y[i] = -y[i];
  }
  return Trial{RegressionProblem(std::move(y), x), std::move(beta), sigma, std::move(e),
               std::move(flipped)};
}

TrialOutcome run_trial(const ExperimentConfig& cfg, double eps, std::uint64_t seed) {
  const Trial t = generate_trial(cfg, eps, seed);
  const RegressionProblem& prob = t.problem;
  const Pseudoinverse pinv(prob.x());

  const Vector beta_lse = pinv.apply(prob.y());
  const double rss = (prob.y() - prob.x() * beta_lse).squaredNorm();
  const double dof = cfg.sd_divisor == SdDivisor::N ? static_cast<double>(cfg.n)
                                                    : static_cast<double>(cfg.n - cfg.p);
  const double sd = std::sqrt(rss / dof);

  SolverConfig sc;
  sc.kernel = cfg.dof_correction ? HuberKernel::with_dof_correction(cfg.c, cfg.n, cfg.p)
                                 : HuberKernel(cfg.c);
  sc.tol = cfg.tol;
  sc.max_iter = cfg.max_iter;
  const FitResult hub = fit(prob, pinv, sc);

  const double beta_sq = t.beta_true.squaredNorm();
  auto log_sq = [&](double s) {
    const double l = std::log10(s / t.sigma_true);
    return l * l;
  };
  TrialOutcome out;
  out.eps = eps;
  out.beta_nmse_lse = (beta_lse - t.beta_true).squaredNorm() / beta_sq;
  out.beta_nmse_hub = (hub.beta - t.beta_true).squaredNorm() / beta_sq;
  out.scale_err_sd = log_sq(sd);
  out.scale_err_hub = log_sq(hub.sigma);
  return out;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, std::ostream* progress) {
  cfg.validate();
  if (progress)
    *progress << "generator: " << kGeneratorName << ", master seed " << cfg.master_seed << '\n';

  std::vector<ResultRow> table;
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<std::optional<TrialOutcome>> outcomes(trials);

  for (std::size_t ei = 0; ei < cfg.eps_grid.size(); ++ei) {
    const double eps = cfg.eps_grid[ei];
    std::fill(outcomes.begin(), outcomes.end(), std::nullopt);

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      for (std::size_t ti = next++; ti < trials; ti = next++) {
        try {
          outcomes[ti] = run_trial(cfg, eps, trial_seed(cfg.master_seed, ei, ti));
          outcomes[ti]->trial = static_cast<int>(ti);
        } catch (const std::exception&) {
          outcomes[ti].reset();
        }
      }
    };
    if (cfg.threads <= 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < cfg.threads; ++t)
        pool.emplace_back(work);
    }

    ResultRow row;
    row.eps = eps;
    row.trials = cfg.trials;
    int ok = 0;
    for (const auto& o : outcomes) {
      if (!o || !std::isfinite(o->beta_nmse_hub) || !std::isfinite(o->scale_err_hub)) {
        ++row.failures;
        continue;
      }
      ++ok;
      row.lse_beta_nmse += o->beta_nmse_lse;
      row.hub_beta_nmse += o->beta_nmse_hub;
      row.sd_scale_err += o->scale_err_sd;
      row.hub_scale_err += o->scale_err_hub;
    }
    if (ok > 0) {
      row.lse_beta_nmse /= ok;
      row.hub_beta_nmse /= ok;
      row.sd_scale_err /= ok;
      row.hub_scale_err /= ok;
    }
    table.push_back(row);
    if (progress)
      *progress << "eps=" << format_double(eps) << ": " << ok << " trials, " << row.failures
                << " failures\n";
  }
  return table;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& table) {
  if (table.empty())
    throw std::invalid_argument("write_csv: empty result table");
  out << kCsvHeader << '\n';
  for (const auto& r : table)
    out << format_double(r.eps) << ',' << format_double(r.lse_beta_nmse) << ','
        << format_double(r.hub_beta_nmse) << ',' << format_double(r.sd_scale_err) << ','
        << format_double(r.hub_scale_err) << ',' << r.trials << ',' << r.failures << '\n';
}

void write_csv(const std::filesystem::path& path, const std::vector<ResultRow>& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw FormatError("cannot open '" + path.string() + "' for writing");
  write_csv(out, table);
  out.flush();
  if (!out)
    throw FormatError("write to '" + path.string() + "' failed");
}

} // namespace hubmm
