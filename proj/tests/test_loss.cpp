#include "hubmm/loss.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

using hubmm::HuberKernel;

namespace {

// E[chi_c(e)], e ~ N(0,1), by composite Simpson on [-12, 12] with the
// kink at +-c placed on panel boundaries.
double alpha_by_quadrature(double c) {
  const double phi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto f = [&](double x) {
    const double s = std::clamp(x, -c, c);
    return 0.5 * s * s * phi0 * std::exp(-0.5 * x * x);
  };
  auto simpson = [&](double a, double b) {
    const int n = 20000;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i)
      acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
  };
  const double lim = 12.0;
  if (c >= lim)
    return simpson(-lim, lim);
  return simpson(-lim, -c) + simpson(-c, c) + simpson(c, lim);
}

const std::vector<double> kGrid = [] {
  std::vector<double> g;
  for (double x = -6.0; x <= 6.0 + 1e-12; x += 0.0125)
    g.push_back(x);
  g.push_back(1.345);
  g.push_back(-1.345);
  return g;
}();

} // namespace

TEST(HuberKernel, RhoExamples) {
  const HuberKernel k(1.345);
  EXPECT_EQ(k.rho(0.0), 0.0);
  EXPECT_DOUBLE_EQ(k.rho(1.0), 0.5);
  EXPECT_NEAR(k.rho(3.0), 3.1304875, 1e-12);
  EXPECT_NEAR(k.rho(-3.0), 3.1304875, 1e-12);
}

TEST(HuberKernel, PsiExamples) {
  const HuberKernel k(1.345);
  EXPECT_EQ(k.psi(0.5), 0.5);
  EXPECT_EQ(k.psi(5.0), 1.345);
  EXPECT_EQ(k.psi(-5.0), -1.345);
}

TEST(HuberKernel, ChiExamples) {
  const HuberKernel k(1.345);
  EXPECT_EQ(k.chi(0.0), 0.0);
  EXPECT_DOUBLE_EQ(k.chi(1.0), 0.5);
  EXPECT_NEAR(k.chi(10.0), 0.9045125, 1e-12);
}

TEST(HuberKernel, WeightExamples) {
  const HuberKernel k(1.345);
  EXPECT_EQ(k.weight(0.0), 1.0);
  EXPECT_EQ(k.weight(1.0), 1.0);
  EXPECT_NEAR(k.weight(2.69), 0.5, 1e-15);
  EXPECT_NEAR(k.weight(-2.69), 0.5, 1e-15);
}

TEST(HuberKernel, VectorFormsMatchScalar) {
  const HuberKernel k(0.7317);
  Eigen::VectorXd x(5);
  x << -3.0, -0.2, 0.0, 0.7317, 9.0;
  const auto r = k.rho(x), p = k.psi(x), c = k.chi(x), w = k.weight(x);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    EXPECT_EQ(r[i], k.rho(x[i]));
    EXPECT_EQ(p[i], k.psi(x[i]));
    EXPECT_EQ(c[i], k.chi(x[i]));
    EXPECT_EQ(w[i], k.weight(x[i]));
  }
}

TEST(HuberKernel, RhoIsConvex) {
  const HuberKernel k(1.345);
  for (std::size_t i = 0; i + 2 < kGrid.size() - 2; i += 3) {
    const double a = kGrid[i], b = kGrid[i + 1], c = kGrid[i + 2];
    const double t = (b - a) / (c - a);
    EXPECT_LE(k.rho(b), (1.0 - t) * k.rho(a) + t * k.rho(c) + 1e-12) << b;
  }
}

TEST(HuberKernel, PsiIsDerivativeOfRho) {
  const HuberKernel k(1.345);
  const double h = 1e-5;
  for (double x : kGrid) {
    if (std::abs(std::abs(x) - k.c()) < h)
      continue; // central difference straddles the kink
    EXPECT_NEAR(k.psi(x), (k.rho(x + h) - k.rho(x - h)) / (2.0 * h), 1e-6) << x;
  }
}

TEST(HuberKernel, ChiTwoFormsAgree) {
  for (double c : {hubmm::kHuberC95, hubmm::kHuberC85, 2.5}) {
    const HuberKernel k(c);
    for (double x : kGrid)
      EXPECT_NEAR(k.chi(x), k.psi(x) * x - k.rho(x), 1e-12) << x;
    EXPECT_NEAR(k.chi(c), k.psi(c) * c - k.rho(c), 1e-12);
    EXPECT_NEAR(k.chi(-c), k.psi(-c) * -c - k.rho(-c), 1e-12);
  }
}

TEST(HuberKernel, ScoreSlopeBounded) {
  const HuberKernel k(1.345);
  const double h = 1e-6;
  for (double x : kGrid) {
    const double slope = (k.psi(x + h) - k.psi(x)) / h;
    EXPECT_GE(slope, -1e-9) << x;
    EXPECT_LE(slope, 1.0 + 1e-9) << x;
    EXPECT_LE(std::abs(k.psi(x)), k.c());
    EXPECT_EQ(k.psi(-x), -k.psi(x));
  }
}

TEST(HuberKernel, WeightMatchesPsiOverX) {
  const HuberKernel k(1.345);
  for (double x : kGrid) {
    if (x == 0.0)
      continue;
    EXPECT_NEAR(k.weight(x), k.psi(x) / x, 1e-15) << x;
    EXPECT_GT(k.weight(x), 0.0);
    EXPECT_LE(k.weight(x), 1.0);
  }
}

TEST(HuberKernel, RejectsBadThreshold) {
  EXPECT_THROW(HuberKernel(0.0), std::domain_error);
  EXPECT_THROW(HuberKernel(-1.0), std::domain_error);
  EXPECT_THROW(HuberKernel(std::numeric_limits<double>::infinity()), std::domain_error);
  EXPECT_THROW(HuberKernel(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST(HuberKernel, StoresAlpha) {
  const HuberKernel k(1.345);
  EXPECT_NEAR(k.alpha(), hubmm::consistency_factor(1.345), 1e-12);
  EXPECT_FALSE(k.dof_corrected());
  const HuberKernel d = HuberKernel::with_dof_correction(1.345, 500, 250);
  EXPECT_TRUE(d.dof_corrected());
  EXPECT_NEAR(d.alpha(), 0.5 * k.alpha(), 1e-15);
  EXPECT_EQ(d.c(), 1.345);
  EXPECT_THROW(HuberKernel::with_dof_correction(1.345, 10, 10), std::domain_error);
}

TEST(ConsistencyFactor, LeastSquaresLimit) {
  EXPECT_NEAR(hubmm::consistency_factor(hubmm::kLeastSquaresC), 0.5, 1e-9);
}

// Reference values from 50-digit quadrature of E[chi_c(e)].
TEST(ConsistencyFactor, MatchesQuadratureReference) {
  const std::vector<std::pair<double, double>> ref = {
      {0.1, 0.0047343041565575150997}, {0.5, 0.092564182573360088841},
      {0.7317, 0.16877768925618989445}, {1.0, 0.2580292754808566502},
      {1.345, 0.35508227413452426296},  {2.0, 0.4602684628181615177},
      {5.0, 0.49999944604015142917},
  };
  for (const auto& [c, a] : ref) {
    EXPECT_NEAR(hubmm::consistency_factor(c), a, 1e-10) << c;
    EXPECT_NEAR(alpha_by_quadrature(c), a, 1e-10) << c;
  }
  EXPECT_NEAR(hubmm::consistency_factor(1.345), 0.3551, 5e-5);
}

TEST(ConsistencyFactor, MonotoneWithLimits) {
  double prev = 0.0;
  for (double c : {0.1, 0.5, 1.0, 1.345, 2.0, 5.0}) {
    const double a = hubmm::consistency_factor(c);
    EXPECT_GT(a, prev);
    EXPECT_LT(a, 0.5);
    prev = a;
  }
  EXPECT_LT(hubmm::consistency_factor(1e-4), 1e-8);
  EXPECT_NEAR(hubmm::consistency_factor(50.0), 0.5, 1e-12);
}

TEST(ConsistencyFactor, AgreesWithMonteCarlo) {
  std::mt19937_64 gen(20240611);
  std::normal_distribution<double> nd;
  const int draws = 1'000'000;
  for (double c : {1.345, 0.7317}) {
    const HuberKernel k(c);
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double v = k.chi(nd(gen));
      s += v;
      s2 += v * v;
    }
    const double mean = s / draws;
    const double se = std::sqrt((s2 / draws - mean * mean) / draws);
    EXPECT_LE(std::abs(mean - k.alpha()), 3.0 * se) << c;
  }
}

TEST(ConsistencyFactor, RejectsBadThreshold) {
  EXPECT_THROW(hubmm::consistency_factor(0.0), std::domain_error);
  EXPECT_THROW(hubmm::consistency_factor(std::nan("")), std::domain_error);
}

TEST(Chi2Cdf, Examples) {
  EXPECT_EQ(hubmm::chi2_cdf(0.0, 1), 0.0);
  EXPECT_EQ(hubmm::chi2_cdf(0.0, 3), 0.0);
  EXPECT_NEAR(hubmm::chi2_cdf(1.809025, 1), 0.82137476543132581327, 1e-12);
  EXPECT_NEAR(hubmm::chi2_cdf(1.809025, 1), 0.8214, 5e-5);
  EXPECT_NEAR(hubmm::chi2_cdf(1.809025, 3), 0.38702703330345270526, 1e-12);
  EXPECT_NEAR(hubmm::chi2_cdf(4.0, 3), 0.7385358700508893778, 1e-12);
  EXPECT_NEAR(hubmm::chi2_cdf(400.0, 3), 1.0, 1e-9);
}

TEST(Chi2Cdf, RejectsBadArguments) {
  EXPECT_THROW(hubmm::chi2_cdf(-0.1, 1), std::domain_error);
  EXPECT_THROW(hubmm::chi2_cdf(1.0, 2), std::domain_error);
}
