#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "asgard/funcs.hpp"
#include "asgard/linops.hpp"
#include "asgard/schedule.hpp"

namespace asgard {

/// min_x f(x) + g(x) + h(Mx), smoothed with scaling S around dot_y.
struct ProblemSpec {
  SmoothTerm f;
  Proximable g;
  Proximable h;
  LinearMap M;
  Scaling S;
  Vector dot_y; // empty means zero
  std::optional<Vector> constraint_target;
  std::optional<double> m_norm_s; // ||M||_{S^-1}; estimated when absent
};

struct DualBlock {
  Proximable h;
  LinearMap M;
  Scaling S; // identity or a single-block block_scalar
  Vector dot_y;
};

/// min_x f(x) + g(x) + sum_i h_i(M_i x).
struct ParallelProblemSpec {
  SmoothTerm f;
  Proximable g;
  std::vector<DualBlock> blocks;
  std::optional<double> m_norm_s; // sqrt(sum_i ||M_i||^2_{S_i^-1}) when absent
};

/// Row-splits M into a parallel problem: one block per block of a
/// block_scalar S, otherwise m contiguous row blocks of near-equal size.
ParallelProblemSpec to_parallel(const ProblemSpec &p, int m);

struct SolverState {
  Vector x_bar;
  Vector x_tilde;
  Vector x_hat;
  Vector x_hathat;   // base point of grad_cache (old-gradients variant)
  Vector grad_cache; // gradient of f at x_hathat
  bool grad_valid = false;
  bool tau_reset = true; // line search: next iteration uses tau = 1
  ParamState params;
  Vector dot_y;
  Vector last_y_star; // maximizer at the last x_hat, concatenated over blocks
  long grad_evals = 0;
  long prox_evals = 0;
};

/// Per-iteration log. Row k describes iteration k: objective values are at
/// x_bar^{k+1} (smoothed with beta_{k+1}), tau and beta are the values the
/// iteration started from, B is B_{k+1}.
struct TraceRow {
  long k = 0;
  double objective = 0.0;
  double smoothed_objective = 0.0;
  std::optional<double> infeasibility;
  double tau = 0.0;
  double beta = 0.0;
  double B = 0.0;
  long grad_evals = 0;
  long prox_evals = 0;
  double wall_time = 0.0;

  double beta_next = 0.0;
  bool linesearch_ok = true;
  int linesearch_trials = 0;
  double line7_gap = 0.0; // |x_hat + tau (x_tilde' - x_tilde) - x_bar'|_inf
  bool reused_gradient = false;
};

using Observer = std::function<void(const TraceRow &, const SolverState &)>;

struct RunOptions {
  long max_iter = 1000;
  std::optional<long> restart_every;
  double objective_change_tol = 0.0; // stop when |F_k - F_{k-1}| <= tol (1 + |F_k|); 0 = off
  bool record_rows = true;
  Observer observer;
  int threads = 1; // parallel variant only
};

struct RunResult {
  std::vector<TraceRow> rows;
  SolverState final_state;
  double L_f = 0.0;
  double M_norm_S = 0.0;
  double B1 = 0.0;
};

struct Metrics {
  double objective;          // f + g + h(Mx), h omitted when it is an indicator of a point
  double smoothed_objective; // f + g + h_beta(Mx; center)
  std::optional<double> infeasibility;
};

Metrics evaluate_metrics(const ProblemSpec &p, VectorView x, double beta);
Metrics evaluate_metrics(const ProblemSpec &p, VectorView x, double beta, const Vector &center);

/// Starting state x_bar = x_tilde = x0, tau = 1, beta = beta0.
SolverState init_state(const ProblemSpec &p, double beta0, VectorView x0);

/// One linearized ASGARD iteration using the constants stored in state.params.
SolverState asgard_step(SolverState state, const ProblemSpec &p);

RunResult run_asgard(const ProblemSpec &p, double beta0, VectorView x0, const RunOptions &opts);

/// Reuses the last gradient while the proximity test with (sigma, delta) holds.
/// sigma < 0 recomputes every iteration.
RunResult run_asgard_old_grad(const ProblemSpec &p, double beta0, VectorView x0, double sigma,
                              double delta, const RunOptions &opts);

/// Backtracking on B_{k+1} from B_k / a with factor a; B0 seeds B_0.
RunResult run_asgard_linesearch(const ProblemSpec &p, double beta0, VectorView x0, double a,
                                double B0, const RunOptions &opts, int max_trials = 200);

RunResult run_parallel_asgard(const ParallelProblemSpec &p, double beta0, VectorView x0,
                              const RunOptions &opts);

using Runner = std::function<RunResult(const RunOptions &)>;

/// Runs inner with momentum, smoothing and center reset every q iterations.
Runner restart_wrap(Runner inner, long q);

} // namespace asgard
