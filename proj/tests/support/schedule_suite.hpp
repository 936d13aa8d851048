#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "asgard/schedule.hpp"

namespace testing_support {

/// tau[k] = tau_k, beta[k] = beta_k, B[k] = B_k (B[0] is unused) of the
/// plain recursion, for k = 0..K.
struct ParamSequence {
  std::vector<double> tau;
  std::vector<double> beta;
  std::vector<double> B;
};

inline ParamSequence algorithm1_sequence(double L_f, double M_norm, double beta0, long K) {
  ParamSequence s;
  s.tau.assign(K + 2, 0.0);
  s.beta.assign(K + 2, 0.0);
  s.B.assign(K + 2, std::numeric_limits<double>::quiet_NaN());
  s.tau[0] = 1.0;
  s.beta[0] = beta0;
  for (long k = 0; k <= K; ++k) {
    s.beta[k + 1] = asgard::update_beta(s.beta[k], s.tau[k]);
    s.B[k + 1] = asgard::update_B(L_f, M_norm, s.beta[k + 1]);
    s.tau[k + 1] = asgard::next_tau_cubic(s.tau[k], asgard::cubic_alpha(s.B[k + 1], L_f));
  }
  return s;
}

/// Largest excess of the three parameter bounds over k = 0..K, relative to
/// max(1, |rhs|) and minus the slack; <= 0 when all hold.
inline double parameter_bound_excess(const ParamSequence &s, long K, double slack) {
  double worst = -std::numeric_limits<double>::infinity();
  auto push = [&](double lhs, double rhs) {
    worst = std::max(worst, (lhs - rhs) / std::max(1.0, std::abs(rhs)) - slack);
  };
  for (long k = 0; k <= K; ++k) {
    const double kk = static_cast<double>(k);
    push(1.0 / (kk + 1.0), s.tau[k]);
    push(s.tau[k], 2.0 / (kk + 2.0));
    push(s.beta[k], s.beta[0] / (kk + 1.0));
    push(s.tau[k] * s.tau[k] * s.B[k + 1], s.tau[0] * s.tau[0] * s.B[1] / (kk + 1.0));
  }
  return worst;
}

} // namespace testing_support
