#pragma once

namespace asgard {

/// Momentum, smoothing and smoothness parameters carried between iterations.
struct ParamState {
  double tau = 1.0;  // tau_k to be used by the next iteration
  double beta = 1.0; // beta_k
  double B = 0.0;    // B_k (B_{k+1} once the iteration completes)
  long k = 0;
  double L_f = 0.0;
  double M_norm_S = 0.0; // ||M||_{S^-1}
};

/// Unique positive root of alpha t^3 + t^2 + tau_k^2 t - tau_k^2.
/// Requires tau_k in (0, 1] and alpha in [0, 1].
double next_tau_cubic(double tau_k, double alpha);

/// Positive root of c t^2 + t - 1 with c = B_next / (tau_prev^2 B_prev).
double linesearch_tau(double tau_prev, double B_prev, double B_next);

/// beta_k / (1 + tau_k)
double update_beta(double beta, double tau);

/// L_f + M_norm_S^2 / beta_next
double update_B(double L_f, double M_norm_S, double beta_next);

/// (B - L_f) / B, the cubic coefficient.
double cubic_alpha(double B, double L_f);

} // namespace asgard
