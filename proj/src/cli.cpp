#include "hubmm/cli.hpp"

#include "hubmm/bench.hpp"
#include "hubmm/denoise.hpp"
#include "hubmm/errors.hpp"
#include "hubmm/format.hpp"
#include "hubmm/hubniht.hpp"
#include "hubmm/hubreg.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace hubmm::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const std::string field =
        trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                              : comma - start));
    double v = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (!field.empty() && *first == '+')
      ++first;
    const auto res = std::from_chars(first, last, v);
    if (field.empty() || res.ec != std::errc() || res.ptr != last)
      return false;
    out.push_back(v);
    if (comma == std::string::npos)
      return true;
    start = comma + 1;
  }
}

} // namespace

RegressionData read_regression_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::vector<double> row;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    if (!parse_row(line, row)) {
      if (rows.empty() && line_no == 1)
        continue; // header
      throw FormatError("line " + std::to_string(line_no) + ": non-numeric field");
    }
    if (row.size() < 2)
      throw FormatError("line " + std::to_string(line_no) +
                        ": need a response and at least one predictor");
    if (!rows.empty() && row.size() != rows.front().size())
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(rows.front().size()) + " fields, got " +
                        std::to_string(row.size()));
    rows.push_back(row);
  }
  if (rows.empty())
    throw FormatError("no data rows");

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(rows.front().size()) - 1;
  RegressionData data{Vector(n), DenseMatrix(n, p)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    data.y[i] = r[0];
    for (Eigen::Index j = 0; j < p; ++j)
      data.x(i, j) = r[static_cast<std::size_t>(j + 1)];
  }
  return data;
}

RegressionData read_regression_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw FormatError("cannot open '" + path.string() + "'");
  try {
    return read_regression_csv(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

namespace {

struct HubregArgs {
  std::string data;
  double c = kHuberC95;
  bool intercept = false;
  double tol = 1e-6;
  int max_iter = 500;
  bool no_adaptive = false;
  bool dof_correction = false;
  std::string trace;
};

struct HubnihtArgs {
  std::string data;
  long k = 0;
  double c = kHuberC95;
  bool no_normalize = false;
  double tol = 1e-6;
  int max_iter = 500;
};

struct DenoiseArgs {
  std::string in;
  std::string out;
  long k = 6;
  std::size_t patch = 8;
  std::size_t stride = 2;
  double c = kHuberC95;
  std::string dict;
  std::optional<double> add_noise;
  std::uint64_t seed = 0;
  std::string noise_model = "impulsive";
  std::string noisy_out;
  std::string report_psnr;
  unsigned threads = 1;
  double tol = 1e-6;
  int max_iter = 500;
};

struct BenchArgs {
  int trials = 200;
  std::uint64_t seed = 42;
  std::string out = "results.csv";
  double c = kHuberC95;
  long n = 500;
  long p = 250;
  double snr_db = 20.0;
  std::string scale_correction = "dof";
  std::string sd_divisor = "n-p";
  unsigned threads = 1;
};

int cmd_hubreg(const HubregArgs& a, std::ostream& out) {
  const RegressionData data = read_regression_csv(std::filesystem::path(a.data));
  const RegressionProblem prob(data.y, data.x, a.intercept);
  SolverConfig cfg;
  cfg.kernel = a.dof_correction ? HuberKernel::with_dof_correction(a.c, prob.n(), prob.p())
                                : HuberKernel(a.c);
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  cfg.adaptive_steps = !a.no_adaptive;
  cfg.record_trace = !a.trace.empty();
  const FitResult res = fit(prob, cfg);

  out << "name,value\n";
  for (Eigen::Index j = 0; j < res.beta.size(); ++j)
    out << "beta" << j << ',' << format_double(res.beta[j]) << '\n';
  out << "sigma," << format_double(res.sigma) << '\n';
  out << "iterations," << res.iterations << '\n';
  out << "converged," << (res.converged ? "true" : "false") << '\n';

  if (!a.trace.empty()) {
    std::ofstream t(a.trace);
    if (!t)
      throw FormatError("--trace: cannot open '" + a.trace + "' for writing");
    t << "iteration,criterion,tau_lambda,relative_step,lambda,mu\n";
    for (std::size_t i = 0; i < res.trace.size(); ++i) {
      const auto& e = res.trace[i];
      t << i + 1 << ',' << format_double(e.criterion) << ',' << format_double(e.tau_lambda) << ','
        << format_double(e.relative_step) << ',' << format_double(e.lambda) << ','
        << format_double(e.mu) << '\n';
    }
  }
  return kOk;
}

int cmd_hubniht(const HubnihtArgs& a, std::ostream& out) {
  RegressionData data = read_regression_csv(std::filesystem::path(a.data));
  const SparseProblem prob(std::move(data.y), std::move(data.x), a.k, !a.no_normalize);
  SolverConfig cfg;
  cfg.kernel = HuberKernel(a.c);
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  const SparseModel model = fit_sparse(prob, cfg);

  out << "index,value\n";
  for (auto i : model.support)
    out << i << ',' << format_double(model.beta[i]) << '\n';
  out << "sigma," << format_double(model.sigma) << '\n';
  out << "iterations," << model.iterations << '\n';
  out << "converged," << (model.converged ? "true" : "false") << '\n';
  return kOk;
}

int cmd_denoise(const DenoiseArgs& a, std::ostream& out, std::ostream& err) {
  const GrayImage input = read_pgm(std::filesystem::path(a.in));
  GrayImage noisy = input;
  if (a.add_noise) {
    if (a.noise_model == "impulsive")
      noisy = add_impulsive_noise(input, *a.add_noise, a.seed);
    else
      noisy = add_gaussian_noise(input, *a.add_noise, a.seed);
    if (!a.noisy_out.empty())
      write_pgm(std::filesystem::path(a.noisy_out), noisy);
  }

  const Dictionary dict = a.dict.empty() ? build_dictionary(a.patch)
                                         : build_dictionary(a.patch, DictionaryKind::FromFile, a.dict);
  SolverConfig cfg;
  cfg.kernel = HuberKernel(a.c);
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  const DenoiseResult res = denoise(noisy, dict, PatchGrid{a.patch, a.stride}, a.k, cfg, a.threads);
  write_pgm(std::filesystem::path(a.out), res.image);
  err << "denoised " << res.patches << " patches (" << res.unconverged << " not converged)\n";

  if (!a.report_psnr.empty()) {
    const GrayImage clean = read_pgm(std::filesystem::path(a.report_psnr));
    out << "noisy_psnr_db," << format_double(psnr(noisy, clean)) << '\n';
    out << "denoised_psnr_db," << format_double(psnr(res.image, clean)) << '\n';
  }
  return kOk;
}

int cmd_bench_fig1(const BenchArgs& a, std::ostream& err) {
  ExperimentConfig cfg;
  cfg.trials = a.trials;
  cfg.master_seed = a.seed;
  cfg.c = a.c;
  cfg.n = a.n;
  cfg.p = a.p;
  cfg.snr_db = a.snr_db;
  cfg.dof_correction = a.scale_correction == "dof";
  cfg.sd_divisor = a.sd_divisor == "n" ? SdDivisor::N : SdDivisor::NMinusP;
  cfg.threads = a.threads;
  const auto table = run_experiment(cfg, &err);
  write_csv(std::filesystem::path(a.out), table);
  err << "wrote " << a.out << '\n';
  return kOk;
}

template <class Fn>
int guarded(const std::string& where, std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const RankDeficient& e) {
    err << where << ": RankDeficient: " << e.what() << '\n';
    return kSolverError;
  } catch (const DegenerateScale& e) {
    err << where << ": DegenerateScale: " << e.what() << '\n';
    return kSolverError;
  } catch (const FormatError& e) {
    err << where << ": FormatError: " << e.what() << '\n';
  } catch (const DimensionMismatch& e) {
    err << where << ": DimensionMismatch: " << e.what() << '\n';
  } catch (const std::domain_error& e) {
    err << where << ": DomainError: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << where << ": InvalidArgument: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << where << ": " << e.what() << '\n';
  }
  return kDataError;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust regression, sparse recovery and denoising with Huber's criterion", "hubmm"};
  app.require_subcommand(1);

  HubregArgs hr;
  auto* hubreg = app.add_subcommand(
      "hubreg", "Joint regression and scale estimate.\n"
                "Input CSV: first column is y, remaining columns are the predictors;\n"
                "an optional non-numeric first line is skipped as a header.\n"
                "Output CSV (stdout): beta<j>, sigma, iterations, converged.");
  hubreg->add_option("--data", hr.data, "Input CSV (y, x1, ..., xp)")->required();
  hubreg->add_option("--c", hr.c, "Huber threshold")->capture_default_str();
  hubreg->add_flag("--intercept", hr.intercept, "Prepend a column of ones to X");
  hubreg->add_option("--tol", hr.tol, "Convergence tolerance")->capture_default_str();
  hubreg->add_option("--max-iter", hr.max_iter, "Iteration limit")->capture_default_str();
  hubreg->add_flag("--no-adaptive", hr.no_adaptive, "Use unit step sizes (plain MM)");
  hubreg->add_flag("--dof-correction", hr.dof_correction, "Scale alpha by (N - p)/N");
  hubreg->add_option("--trace", hr.trace, "Write the per-iteration trace as CSV to this path");

  HubnihtArgs hn;
  auto* hubniht = app.add_subcommand(
      "hubniht", "K-sparse fit by hard thresholding.\n"
                 "Input CSV as for hubreg. Output CSV (stdout): index,value rows for the\n"
                 "nonzero coefficients (0-based column index), then sigma, iterations, converged.");
  hubniht->add_option("--data", hn.data, "Input CSV (y, x1, ..., xp)")->required();
  hubniht->add_option("--k", hn.k, "Sparsity budget K")->required();
  hubniht->add_option("--c", hn.c, "Huber threshold")->capture_default_str();
  hubniht->add_flag("--no-normalize", hn.no_normalize, "Do not normalize the columns of X");
  hubniht->add_option("--tol", hn.tol, "Convergence tolerance")->capture_default_str();
  hubniht->add_option("--max-iter", hn.max_iter, "Iteration limit")->capture_default_str();

  DenoiseArgs dn;
  auto* den = app.add_subcommand("denoise", "Patch-wise sparse-coding denoiser for PGM images");
  den->add_option("--in", dn.in, "Input PGM (P5 or P2)")->required();
  den->add_option("--out", dn.out, "Output PGM (P5)")->required();
  den->add_option("--k", dn.k, "Sparsity budget per patch")->capture_default_str();
  den->add_option("--patch", dn.patch, "Patch side length")->capture_default_str();
  den->add_option("--stride", dn.stride, "Window step")->capture_default_str();
  den->add_option("--c", dn.c, "Huber threshold")->capture_default_str();
  den->add_option("--dict", dn.dict, "Dictionary file ('d p' header, d rows of p reals)");
  auto* noise = den->add_option("--add-noise", dn.add_noise,
                                "Corrupt the input first: probability (impulsive) or sd (gaussian)");
  den->add_option("--seed", dn.seed, "Noise seed")->capture_default_str()->needs(noise);
  den->add_option("--noise-model", dn.noise_model, "Noise model for --add-noise")
      ->check(CLI::IsMember({"impulsive", "gaussian"}))
      ->capture_default_str();
  den->add_option("--noisy-out", dn.noisy_out, "Also write the corrupted input here")->needs(noise);
  den->add_option("--report-psnr", dn.report_psnr, "Clean reference PGM; prints noisy and denoised PSNR");
  den->add_option("--threads", dn.threads, "Worker threads")->capture_default_str();
  den->add_option("--tol", dn.tol, "Per-patch convergence tolerance")->capture_default_str();
  den->add_option("--max-iter", dn.max_iter, "Per-patch iteration limit")->capture_default_str();

  BenchArgs bn;
  auto* bench = app.add_subcommand("bench", "Monte-Carlo benchmarks");
  bench->require_subcommand(1);
  auto* fig1 = bench->add_subcommand(
      "fig1", "LSE/SD vs Huber estimates under sign-flip contamination.\n"
              "Writes eps,lse_beta_nmse,hub_beta_nmse,sd_scale_err,hub_scale_err,trials,failures.");
  fig1->add_option("--trials", bn.trials, "Trials per contamination level")->capture_default_str();
  fig1->add_option("--seed", bn.seed, "Master seed")->capture_default_str();
  fig1->add_option("--out", bn.out, "Output CSV")->capture_default_str();
  fig1->add_option("--c", bn.c, "Huber threshold")->capture_default_str();
  fig1->add_option("--n", bn.n, "Observations N")->capture_default_str();
  fig1->add_option("--p", bn.p, "Predictors p")->capture_default_str();
  fig1->add_option("--snr-db", bn.snr_db, "Signal-to-noise ratio in dB")->capture_default_str();
  fig1->add_option("--scale-correction", bn.scale_correction, "Huber alpha: 'dof' scales by (N-p)/N")
      ->check(CLI::IsMember({"dof", "none"}))
      ->capture_default_str();
  fig1->add_option("--sd-divisor", bn.sd_divisor, "Divisor of RSS for the SD baseline")
      ->check(CLI::IsMember({"n", "n-p"}))
      ->capture_default_str();
  fig1->add_option("--threads", bn.threads, "Worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kDataError;
  }

  if (*hubreg)
    return guarded("hubmm hubreg (--data " + hr.data + ")", err, [&] { return cmd_hubreg(hr, out); });
  if (*hubniht)
    return guarded("hubmm hubniht (--data " + hn.data + ")", err, [&] { return cmd_hubniht(hn, out); });
  if (*den)
    return guarded("hubmm denoise (--in " + dn.in + ")", err, [&] { return cmd_denoise(dn, out, err); });
  if (*fig1)
    return guarded("hubmm bench fig1 (--out " + bn.out + ")", err, [&] { return cmd_bench_fig1(bn, err); });
  return kDataError;
}

} // namespace hubmm::cli
