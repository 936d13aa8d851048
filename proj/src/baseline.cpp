#include "asgard/baseline.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "asgard/errors.hpp"

namespace asgard {

VuCondatConfig VuCondatConfig::make(double tau_p, double sigma_d, long max_iter, double L_f,
                                    double M_norm) {
  if (!(tau_p > 0.0) || !(sigma_d > 0.0)) throw ParameterError("Vu-Condat steps must be positive");
  if (max_iter < 0) throw ParameterError("max_iter must be >= 0");
  const double lhs = tau_p * (0.5 * L_f + sigma_d * M_norm * M_norm);
  if (!(lhs < 1.0)) {
    throw ParameterError("Vu-Condat step condition violated: tau (L_f/2 + sigma ||M||^2) = " +
                         std::to_string(lhs) + " >= 1");
  }
  return {tau_p, sigma_d, max_iter};
}

VuCondatConfig VuCondatConfig::defaults(double L_f, double M_norm, long max_iter) {
  const double sigma = M_norm > 0.0 ? 1.0 / M_norm : 1.0;
  const double denom = 0.5 * L_f + sigma * M_norm * M_norm;
  const double tau = denom > 0.0 ? 0.9 / denom : 1.0;
  return make(tau, sigma, max_iter, L_f, M_norm);
}

VuCondatResult run_vu_condat(const ProblemSpec &p, const VuCondatConfig &cfg, VectorView x0,
                             VectorView y0, bool record_rows,
                             const std::function<void(const TraceRow &)> &observer) {
  require_same_size(static_cast<std::size_t>(x0.size()), static_cast<std::size_t>(p.M.in_dim()), "x0");
  require_same_size(static_cast<std::size_t>(y0.size()), static_cast<std::size_t>(p.M.out_dim()), "y0");
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const auto t0 = std::chrono::steady_clock::now();

  VuCondatResult res{{}, x0, y0};
  if (record_rows) res.rows.reserve(static_cast<std::size_t>(cfg.max_iter));
  long grad_evals = 0;
  long prox_evals = 0;
  for (long k = 0; k < cfg.max_iter; ++k) {
    const Vector grad = p.f.gradient(res.x) + p.M.adjoint(res.y);
    Vector x_next = p.g.prox(res.x - cfg.tau_p * grad, cfg.tau_p);
    const Vector y_bar = res.y + cfg.sigma_d * p.M.apply(2.0 * x_next - res.x);
    res.y = p.h.conjugate_prox(y_bar, cfg.sigma_d);
    res.x = std::move(x_next);
    grad_evals += 1;
    prox_evals += 2;

    if (!record_rows && !observer) continue;
    const Metrics m = evaluate_metrics(p, res.x, 1.0);
    TraceRow row;
    row.k = k;
    row.objective = m.objective;
    row.smoothed_objective = nan;
    row.infeasibility = m.infeasibility;
    row.tau = nan;
    row.beta = nan;
    row.B = nan;
    row.beta_next = nan;
    row.grad_evals = grad_evals;
    row.prox_evals = prox_evals;
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (observer) observer(row);
    if (record_rows) res.rows.push_back(row);
  }
  return res;
}

} // namespace asgard
