#include <cmath>

#include <gtest/gtest.h>

#include "asgard/errors.hpp"
#include "asgard/schedule.hpp"
#include "sampling.hpp"
#include "schedule_suite.hpp"

using namespace asgard;
using testing_support::Sampler;

namespace {

double P(double t, double tau, double alpha) { return alpha * t * t * t + t * t + tau * tau * t - tau * tau; }

// Plain bisection on [0, tau], the independent oracle for the root.
double bisect_root(double tau, double alpha) {
  double lo = 0.0, hi = tau;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (P(mid, tau, alpha) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST(NextTauCubic, FrozenRoots) {
  EXPECT_NEAR(next_tau_cubic(1.0, 0.0), 0.6180339887498949, 1e-12);
  EXPECT_NEAR(next_tau_cubic(1.0, 0.0), (std::sqrt(5.0) - 1.0) / 2.0, 1e-12);
  EXPECT_NEAR(next_tau_cubic(1.0, 1.0), 0.5436890126920763, 1e-12);
  EXPECT_NEAR(bisect_root(1.0, 1.0), 0.5436890126920763, 1e-15);
}

TEST(NextTauCubic, ResidualAndBracketOnGrid) {
  for (int i = 1; i <= 100; ++i) {
    const double tau = i / 100.0;
    for (int j = 0; j <= 50; ++j) {
      const double alpha = j / 50.0;
      const double t = next_tau_cubic(tau, alpha);
      EXPECT_GT(t, 0.0);
      EXPECT_LT(t, tau);
      EXPECT_LE(std::abs(P(t, tau, alpha)), 1e-14) << tau << " " << alpha;
      EXPECT_NEAR(t, bisect_root(tau, alpha), 1e-12);
      // The quadratic root bounds the cubic root from above.
      EXPECT_LE(t, next_tau_cubic(tau, 0.0));
    }
  }
}

TEST(NextTauCubic, TinyTau) {
  for (double tau : {1e-4, 1e-6, 1e-8}) {
    const double t = next_tau_cubic(tau, 0.999);
    EXPECT_LT(t, tau);
    EXPECT_LE(std::abs(P(t, tau, 0.999)), 1e-14);
  }
}

TEST(NextTauCubic, RejectsOutOfRange) {
  EXPECT_THROW(next_tau_cubic(0.0, 0.5), ParameterError);
  EXPECT_THROW(next_tau_cubic(1.5, 0.5), ParameterError);
  EXPECT_THROW(next_tau_cubic(0.5, -0.1), ParameterError);
  EXPECT_THROW(next_tau_cubic(0.5, 1.1), ParameterError);
}

TEST(LinesearchTau, Examples) {
  EXPECT_NEAR(linesearch_tau(1.0, 3.0, 3.0), (std::sqrt(5.0) - 1.0) / 2.0, 1e-15);
  const double t4 = linesearch_tau(0.5, 1.0, 1.0);
  EXPECT_NEAR(t4, 0.3903882032022076, 1e-15);
  EXPECT_NEAR(t4, (-1.0 + std::sqrt(17.0)) / 8.0, 1e-15);
  EXPECT_NEAR(4.0 * t4 * t4 + t4 - 1.0, 0.0, 1e-15);
  EXPECT_NEAR(linesearch_tau(1.0, 1.0, 2.0), 0.5, 1e-15);
  EXPECT_THROW(linesearch_tau(0.0, 1.0, 1.0), ParameterError);
  EXPECT_THROW(linesearch_tau(1.0, -1.0, 1.0), ParameterError);
}

TEST(UpdateBeta, Examples) {
  EXPECT_EQ(update_beta(1.0, 1.0), 0.5);
  EXPECT_EQ(update_beta(0.3, 0.0), 0.3);
}

TEST(UpdateB, Examples) {
  EXPECT_EQ(update_B(0.0, 1.0, 0.5), 2.0);
  for (double beta : {1e-3, 1.0, 1e3}) EXPECT_EQ(update_B(3.0, 0.0, beta), 3.0);
  EXPECT_THROW(update_B(1.0, 1.0, 0.0), ParameterError);
  EXPECT_THROW(cubic_alpha(0.0, 0.0), ParameterError);
  EXPECT_EQ(cubic_alpha(4.0, 1.0), 0.75);
}

TEST(Algorithm1Sequence, BStrictlyIncreasing) {
  const auto s = testing_support::algorithm1_sequence(2.0, 1.5, 1.0, 500);
  for (long k = 1; k < 500; ++k) EXPECT_GT(s.B[k + 1], s.B[k]);
}

TEST(Algorithm1Sequence, BetaDecay) {
  const auto s = testing_support::algorithm1_sequence(1.0, 1.0, 1.0, 10000);
  for (long k = 0; k <= 10000; ++k) EXPECT_LE(s.beta[k], 1.0 / (k + 1.0) * (1.0 + 1e-12));
}

TEST(Algorithm1Sequence, TelescopingIdentity) {
  Sampler rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const double L = rng.log_uniform(1e-2, 1e2);
    const double Mn = rng.log_uniform(1e-2, 1e2);
    const double b0 = rng.log_uniform(1e-2, 1e2);
    const auto s = testing_support::algorithm1_sequence(L, Mn, b0, 10000);
    double worst = 0.0;
    for (long k = 1; k <= 10000; ++k) {
      const double lhs = (1.0 - s.tau[k]) / (s.tau[k] * s.tau[k] * s.B[k + 1]);
      const double rhs = 1.0 / (s.tau[k - 1] * s.tau[k - 1] * s.B[k]);
      worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    EXPECT_LE(worst, 1e-10) << L << " " << Mn << " " << b0;
  }
}

TEST(Algorithm1Sequence, ParameterBoundsOnRandomGrid) {
  Sampler rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const double L = trial == 0 ? 0.0 : rng.log_uniform(1e-3, 1e3);
    const double Mn = trial == 1 ? 0.0 : rng.log_uniform(1e-3, 1e3);
    const double b0 = rng.log_uniform(1e-3, 1e3);
    const auto s = testing_support::algorithm1_sequence(L, Mn, b0, 10000);
    EXPECT_LE(testing_support::parameter_bound_excess(s, 10000, 1e-12), 0.0) << L << " " << Mn << " " << b0;
  }
}

TEST(Algorithm1Sequence, VanishingOperatorGivesQuadraticRecursion) {
  // ||M|| = 0 makes B_{k+1} = L_f, so alpha = 0 and the cubic loses its leading term.
  const auto s = testing_support::algorithm1_sequence(3.0, 0.0, 1.0, 200);
  for (long k = 0; k < 200; ++k) {
    const double t = s.tau[k];
    const double want = (-t * t + std::sqrt(t * t * t * t + 4.0 * t * t)) / 2.0;
    EXPECT_NEAR(s.tau[k + 1], want, 1e-15);
  }
}

TEST(Algorithm1Sequence, ZeroLipschitzGivesFullCubic) {
  // L_f = 0 makes alpha = 1 at every step.
  const auto s = testing_support::algorithm1_sequence(0.0, 2.0, 1.0, 200);
  EXPECT_NEAR(s.tau[1], 0.5436890126920763, 1e-12);
  for (long k = 0; k < 200; ++k) {
    EXPECT_EQ(cubic_alpha(s.B[k + 1], 0.0), 1.0);
    EXPECT_LE(std::abs(P(s.tau[k + 1], s.tau[k], 1.0)), 1e-14);
  }
}
