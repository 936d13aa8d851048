#include "asgard/schedule.hpp"

#include <cmath>
#include <string>

#include "asgard/errors.hpp"

namespace asgard {

namespace {

constexpr double kResidualTol = 1e-14;
constexpr int kMaxIter = 60;

double cubic(double t, double alpha, double t2) { return ((alpha * t + 1.0) * t + t2) * t - t2; }

} // namespace

double next_tau_cubic(double tau_k, double alpha) {
  if (!(tau_k > 0.0 && tau_k <= 1.0)) {
    throw ParameterError("next_tau_cubic: tau_k must lie in (0, 1], got " + std::to_string(tau_k));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ParameterError("next_tau_cubic: alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  const double t2 = tau_k * tau_k;
  // Root of t^2 + tau^2 t - tau^2, written without cancellation. P is convex
  // and increasing on (0, inf) with P(0) < 0 <= P(hi), so Newton from hi
  // decreases monotonically onto the root.
  const double hi = 2.0 * tau_k / (tau_k + std::sqrt(t2 + 4.0));
  if (alpha == 0.0) return hi;

  // Iterate until Newton stops decreasing rather than until the residual is
  // small: for tiny tau_k the terms of P are of order tau_k^2, so an absolute
  // residual test alone would leave the root with a large relative error.
  double t = hi;
  for (int it = 0; it < kMaxIter; ++it) {
    const double p = cubic(t, alpha, t2);
    if (p <= 0.0) break;
    const double dp = (3.0 * alpha * t + 2.0) * t + t2;
    const double next = t - p / dp;
    if (!(next > 0.0 && next < t)) break;
    t = next;
  }
  if (std::abs(cubic(t, alpha, t2)) <= kResidualTol) return t;

  double lo = 0.0;
  double up = hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + up);
    const double p = cubic(mid, alpha, t2);
    if (std::abs(p) <= kResidualTol || mid == lo || mid == up) return mid;
    (p < 0.0 ? lo : up) = mid;
  }
  return 0.5 * (lo + up);
}

double linesearch_tau(double tau_prev, double B_prev, double B_next) {
  if (!(tau_prev > 0.0 && B_prev > 0.0 && B_next > 0.0)) {
    throw ParameterError("linesearch_tau: all inputs must be positive");
  }
  const double c = B_next / (tau_prev * tau_prev * B_prev);
  return 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * c));
}

double update_beta(double beta, double tau) { return beta / (1.0 + tau); }

double update_B(double L_f, double M_norm_S, double beta_next) {
  if (!(beta_next > 0.0)) throw ParameterError("update_B: beta must be positive");
  return L_f + M_norm_S * M_norm_S / beta_next;
}

double cubic_alpha(double B, double L_f) {
  if (!(B > 0.0)) {
    throw ParameterError("smoothness bound B is zero: f is constant and M vanishes");
  }
  return (B - L_f) / B;
}

} // namespace asgard
