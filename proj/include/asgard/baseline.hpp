#pragma once

#include <functional>
#include <vector>

#include "asgard/solvers.hpp"

namespace asgard {

/// Primal and dual steps of the Vu-Condat iteration.
struct VuCondatConfig {
  double tau_p;
  double sigma_d;
  long max_iter;

  /// Throws ParameterError unless tau_p (L_f / 2 + sigma_d ||M||^2) < 1.
  static VuCondatConfig make(double tau_p, double sigma_d, long max_iter, double L_f,
                             double M_norm);
  /// sigma_d = 1 / ||M||, tau_p = 0.9 / (L_f / 2 + sigma_d ||M||^2).
  static VuCondatConfig defaults(double L_f, double M_norm, long max_iter);
};

struct VuCondatResult {
  std::vector<TraceRow> rows;
  Vector x;
  Vector y;
};

/// x' = prox_{tau g}(x - tau (grad f(x) + M^* y)),
/// y' = prox_{sigma h^*}(y + sigma M (2 x' - x)).
/// Rows carry NaN in the smoothing columns. S is not used.
VuCondatResult run_vu_condat(const ProblemSpec &p, const VuCondatConfig &cfg, VectorView x0,
                             VectorView y0, bool record_rows = true,
                             const std::function<void(const TraceRow &)> &observer = {});

} // namespace asgard
