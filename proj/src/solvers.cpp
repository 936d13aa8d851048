#include "asgard/solvers.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "asgard/errors.hpp"
#include "asgard/smoothing.hpp"

namespace asgard {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kExitRounding = 8.0 * std::numeric_limits<double>::epsilon();

struct DualEval {
  double h_value;
  Vector v;      // M^* y_star
  Vector y_star; // concatenated over blocks
};

Vector center_or_zero(const Vector &dot_y, Index dim, const char *what) {
  if (dot_y.size() == 0) return Vector::Zero(dim);
  require_same_size(static_cast<std::size_t>(dot_y.size()), static_cast<std::size_t>(dim), what);
  return dot_y;
}

// Block value and squared S^-1 residual of a point constraint.
struct BlockMetric {
  double h_value = 0.0;
  double infeas_sq = 0.0;
  bool point = false;
};

BlockMetric block_metric(const Proximable &h, double s, VectorView y) {
  if (const auto *pt = std::get_if<Proximable::IndicatorPoint>(&h.kind())) {
    return {0.0, (y - pt->c).squaredNorm() / s, true};
  }
  return {h.value(y), 0.0, false};
}

/// Single dual space, possibly split into scalar-scaled blocks.
class SingleModel {
public:
  SingleModel(const ProblemSpec &p, std::optional<double> norm_override)
      : p_(p), blocks_(scaled_blocks(p.h, p.S, p.M.out_dim())) {
    require_same_size(static_cast<std::size_t>(p.f.dim()), static_cast<std::size_t>(p.M.in_dim()),
                      "f domain vs M input");
    if (auto d = p.h.dim()) {
      require_same_size(static_cast<std::size_t>(*d), static_cast<std::size_t>(p.M.out_dim()),
                        "h domain vs M output");
    }
    if (p.constraint_target) {
      require_same_size(static_cast<std::size_t>(p.constraint_target->size()),
                        static_cast<std::size_t>(p.M.out_dim()), "constraint target");
    }
    center_ = center_or_zero(p.dot_y, p.M.out_dim(), "dot_y");
    M_norm_ = norm_override ? *norm_override
                            : (p.m_norm_s ? *p.m_norm_s : operator_norm(p.M, p.S));
  }

  const SmoothTerm &f() const { return p_.f; }
  const Proximable &g() const { return p_.g; }
  double L_f() const { return p_.f.lipschitz(); }
  double M_norm() const { return M_norm_; }
  Index dim() const { return p_.M.in_dim(); }
  long num_blocks() const { return static_cast<long>(blocks_.size()); }
  const Vector &initial_center() const { return center_; }

  DualEval dual(VectorView x, double beta, const Vector &center) const {
    const Vector y = p_.M.apply(x);
    if (blocks_.size() == 1) {
      BlockEval e = smoothed_block(blocks_[0].h, beta, blocks_[0].s, y, center);
      Vector v = p_.M.adjoint(e.y_star);
      return {e.value, std::move(v), std::move(e.y_star)};
    }
    double total = 0.0;
    Vector u(y.size());
    for (const auto &b : blocks_) {
      BlockEval e = smoothed_block(b.h, beta, b.s, y.segment(b.offset, b.len),
                                   center.segment(b.offset, b.len));
      total += e.value;
      u.segment(b.offset, b.len) = e.y_star;
    }
    Vector v = p_.M.adjoint(u);
    return {total, std::move(v), std::move(u)};
  }

  Metrics metrics(VectorView x, double beta, const Vector &center) const {
    const Vector y = p_.M.apply(x);
    double hv = 0.0;
    double infeas_sq = 0.0;
    bool any_point = false;
    if (blocks_.size() == 1) {
      BlockMetric bm = block_metric(blocks_[0].h, blocks_[0].s, y);
      hv = bm.h_value;
      infeas_sq = bm.infeas_sq;
      any_point = bm.point;
    } else {
      for (const auto &b : blocks_) {
        BlockMetric bm = block_metric(b.h, b.s, y.segment(b.offset, b.len));
        hv += bm.h_value;
        infeas_sq += bm.infeas_sq;
        any_point = any_point || bm.point;
      }
    }
    const double fg = p_.f.value(x) + p_.g.value(x);
    Metrics m{fg + hv, fg + dual(x, beta, center).h_value, std::nullopt};
    if (p_.constraint_target) {
      m.infeasibility = p_.S.inverse_norm(y - *p_.constraint_target);
    } else if (any_point) {
      m.infeasibility = std::sqrt(infeas_sq);
    }
    return m;
  }

private:
  const ProblemSpec &p_;
  std::vector<ScaledBlock> blocks_;
  Vector center_;
  double M_norm_;
};

double block_scalar_of(const Scaling &S) {
  if (S.is_identity()) return 1.0;
  if (const auto *bs = std::get_if<Scaling::BlockScalar>(&S.kind()); bs && bs->sizes.size() == 1) {
    return bs->scalars[0];
  }
  throw CapabilityError("parallel blocks support S_i = identity or a single scalar block");
}

/// One dual space per block, evaluated independently and reduced in order.
class BlockModel {
public:
  BlockModel(const ParallelProblemSpec &p, int threads) : p_(p), threads_(threads) {
    if (p.blocks.empty()) throw ShapeError("parallel problem needs at least one block");
    Index total = 0;
    double norm_sq = 0.0;
    for (const auto &b : p.blocks) {
      require_same_size(static_cast<std::size_t>(b.M.in_dim()), static_cast<std::size_t>(p.f.dim()),
                        "block operator input");
      if (auto d = b.h.dim()) {
        require_same_size(static_cast<std::size_t>(*d), static_cast<std::size_t>(b.M.out_dim()),
                          "block h domain");
      }
      scalars_.push_back(block_scalar_of(b.S));
      offsets_.push_back(total);
      total += b.M.out_dim();
      if (!p.m_norm_s) {
        const double n = operator_norm(b.M, b.S);
        norm_sq += n * n;
      }
    }
    center_.resize(total);
    for (std::size_t i = 0; i < p.blocks.size(); ++i) {
      const Index len = p.blocks[i].M.out_dim();
      center_.segment(offsets_[i], len) = center_or_zero(p.blocks[i].dot_y, len, "block dot_y");
    }
    M_norm_ = p.m_norm_s ? *p.m_norm_s : std::sqrt(norm_sq);
  }

  const SmoothTerm &f() const { return p_.f; }
  const Proximable &g() const { return p_.g; }
  double L_f() const { return p_.f.lipschitz(); }
  double M_norm() const { return M_norm_; }
  Index dim() const { return p_.f.dim(); }
  long num_blocks() const { return static_cast<long>(p_.blocks.size()); }
  const Vector &initial_center() const { return center_; }

  DualEval dual(VectorView x, double beta, const Vector &center) const {
    const std::size_t m = p_.blocks.size();
    auto eval = [&](std::size_t i) {
      const auto &b = p_.blocks[i];
      const Index len = b.M.out_dim();
      return smoothed_block(b.h, beta, scalars_[i], b.M.apply(x), center.segment(offsets_[i], len));
    };
    std::vector<BlockEval> evals;
    evals.reserve(m);
    if (threads_ > 1 && m > 1) {
      std::vector<std::future<BlockEval>> futures;
      futures.reserve(m);
      for (std::size_t i = 0; i < m; ++i) {
        const auto policy = static_cast<int>(i) < threads_ ? std::launch::async : std::launch::deferred;
        futures.push_back(std::async(policy, eval, i));
      }
      for (auto &fu : futures) evals.push_back(fu.get());
    } else {
      for (std::size_t i = 0; i < m; ++i) evals.push_back(eval(i));
    }
    // Fixed summation order, independent of completion order.
    double total = 0.0;
    Vector u(center.size());
    Vector v = p_.blocks[0].M.adjoint(evals[0].y_star);
    for (std::size_t i = 1; i < m; ++i) v += p_.blocks[i].M.adjoint(evals[i].y_star);
    for (std::size_t i = 0; i < m; ++i) {
      total += evals[i].value;
      u.segment(offsets_[i], evals[i].y_star.size()) = evals[i].y_star;
    }
    return {total, std::move(v), std::move(u)};
  }

  Metrics metrics(VectorView x, double beta, const Vector &center) const {
    double hv = 0.0;
    double infeas_sq = 0.0;
    bool any_point = false;
    for (std::size_t i = 0; i < p_.blocks.size(); ++i) {
      BlockMetric bm = block_metric(p_.blocks[i].h, scalars_[i], p_.blocks[i].M.apply(x));
      hv += bm.h_value;
      infeas_sq += bm.infeas_sq;
      any_point = any_point || bm.point;
    }
    const double fg = p_.f.value(x) + p_.g.value(x);
    Metrics m{fg + hv, fg + dual(x, beta, center).h_value, std::nullopt};
    if (any_point) m.infeasibility = std::sqrt(infeas_sq);
    return m;
  }

private:
  const ParallelProblemSpec &p_;
  int threads_;
  std::vector<double> scalars_;
  std::vector<Index> offsets_;
  Vector center_;
  double M_norm_;
};

// ---------------------------------------------------------------------------

enum class Variant { plain, old_grad, linesearch };

struct VariantParams {
  Variant kind = Variant::plain;
  double sigma = 0.0;
  double delta = 0.0;
  double a = 2.0;
  double B0 = 0.0;
  int max_trials = 200;
};

struct StepInfo {
  double tau;
  double beta;
  double beta_next;
  double B;
  double line7_gap;
  int trials = 1;
  bool linesearch_ok = true;
  bool reused = false;
};

double line7_gap(const Vector &x_bar_next, const Vector &x_hat, double tau, const Vector &x_tilde_next,
                 const Vector &x_tilde) {
  if (x_bar_next.size() == 0) return 0.0;
  return (x_hat + tau * (x_tilde_next - x_tilde) - x_bar_next).cwiseAbs().maxCoeff();
}

template <class Model>
SolverState make_state(const Model &model, double beta0, VectorView x0) {
  if (!(beta0 > 0.0) || !std::isfinite(beta0)) throw ParameterError("beta0 must be positive");
  require_same_size(static_cast<std::size_t>(x0.size()), static_cast<std::size_t>(model.dim()), "x0");
  SolverState s;
  s.x_bar = x0;
  s.x_tilde = x0;
  s.x_hat = x0;
  s.x_hathat = x0;
  s.params.tau = 1.0;
  s.params.beta = beta0;
  s.params.k = 0;
  s.params.L_f = model.L_f();
  s.params.M_norm_S = model.M_norm();
  s.dot_y = model.initial_center();
  s.last_y_star = Vector::Zero(s.dot_y.size());
  return s;
}

// Lines 6-7: x_tilde' = prox(x_tilde - (grad + v)/(tau B)), x_bar' = (1-tau) x_bar + tau x_tilde'.
template <class Model>
void primal_update(const Model &model, const SolverState &s, double tau, double B,
                   const Vector &grad, const Vector &v, Vector &x_tilde_next, Vector &x_bar_next) {
  const double step = 1.0 / (tau * B);
  x_tilde_next = model.g().prox(s.x_tilde - step * (grad + v), step);
  x_bar_next = (1.0 - tau) * s.x_bar + tau * x_tilde_next;
}

template <class Model>
StepInfo plain_or_old_grad_step(const Model &model, const VariantParams &vp, SolverState &s) {
  ParamState &p = s.params;
  const double tau = p.tau;
  const double beta = p.beta;
  s.x_hat = (1.0 - tau) * s.x_bar + tau * s.x_tilde;
  const double beta_next = update_beta(beta, tau);
  const double B = update_B(p.L_f, p.M_norm_S, beta_next);
  const double alpha = cubic_alpha(B, p.L_f);

  DualEval d = model.dual(s.x_hat, beta_next, s.dot_y);
  s.prox_evals += model.num_blocks();

  Vector x_tilde_next;
  Vector x_bar_next;
  bool reused = false;
  const bool may_reuse = vp.kind == Variant::old_grad && vp.sigma >= 0.0 && s.grad_valid && p.k > 0;
  if (may_reuse) {
    primal_update(model, s, tau, B, s.grad_cache, d.v, x_tilde_next, x_bar_next);
    s.prox_evals += 1;
    const double lhs =
        0.5 * (x_bar_next - s.x_hathat).squaredNorm() - 0.5 * (x_bar_next - s.x_hat).squaredNorm();
    const double rhs = vp.sigma * std::pow(tau * tau * B / p.L_f, 2.0 + vp.delta);
    reused = lhs <= rhs;
  }
  if (!reused) {
    Vector grad = model.f().gradient(s.x_hat);
    s.grad_evals += 1;
    primal_update(model, s, tau, B, grad, d.v, x_tilde_next, x_bar_next);
    s.prox_evals += 1;
    if (vp.kind == Variant::old_grad) {
      s.x_hathat = s.x_hat;
      s.grad_cache = std::move(grad);
      s.grad_valid = true;
    }
  }

  StepInfo info{tau, beta, beta_next, B, line7_gap(x_bar_next, s.x_hat, tau, x_tilde_next, s.x_tilde)};
  info.reused = reused;
  s.x_tilde = std::move(x_tilde_next);
  s.x_bar = std::move(x_bar_next);
  s.last_y_star = std::move(d.y_star);
  p.tau = next_tau_cubic(tau, alpha);
  p.beta = beta_next;
  p.B = B;
  p.k += 1;
  return info;
}

template <class Model>
StepInfo linesearch_step(const Model &model, const VariantParams &vp, SolverState &s) {
  ParamState &p = s.params;
  const double beta = p.beta;
  const double B_prev = p.B;
  const double tau_prev = p.tau;
  double B = B_prev / vp.a;
  for (int trial = 1; trial <= vp.max_trials; ++trial) {
    B = vp.a * B;
    const double tau = s.tau_reset ? 1.0 : linesearch_tau(tau_prev, B_prev, B);
    Vector x_hat = (1.0 - tau) * s.x_bar + tau * s.x_tilde;
    const double beta_next = update_beta(beta, tau);
    DualEval d = model.dual(x_hat, beta_next, s.dot_y);
    auto [f_hat, grad] = model.f().value_grad(x_hat);
    s.grad_evals += 1;
    s.prox_evals += model.num_blocks();

    const double step = 1.0 / (tau * B);
    Vector gv = grad + d.v;
    Vector x_tilde_next = model.g().prox(s.x_tilde - step * gv, step);
    Vector x_bar_next = (1.0 - tau) * s.x_bar + tau * x_tilde_next;
    s.prox_evals += 1;

    const double f_bar = model.f().value(x_bar_next);
    const double h_bar = model.dual(x_bar_next, beta_next, s.dot_y).h_value;
    s.prox_evals += model.num_blocks();
    const Vector diff = x_bar_next - x_hat;
    const double lhs = f_bar + h_bar;
    const double rhs = f_hat + d.h_value + gv.dot(diff) + 0.5 * B * diff.squaredNorm();
    // Near convergence both sides agree to rounding while the quadratic term
    // is below it; without this guard B would double on noise alone.
    const double noise = kExitRounding * (std::abs(f_bar) + std::abs(h_bar) + std::abs(f_hat) +
                                          std::abs(d.h_value));
    if (lhs <= rhs + noise) {
      StepInfo info{tau, beta, beta_next, B, line7_gap(x_bar_next, x_hat, tau, x_tilde_next, s.x_tilde)};
      info.trials = trial;
      s.x_hat = std::move(x_hat);
      s.x_tilde = std::move(x_tilde_next);
      s.x_bar = std::move(x_bar_next);
      s.last_y_star = std::move(d.y_star);
      // The line search keeps the tau it used; the next iteration solves for a new one.
      p.tau = tau;
      p.beta = beta_next;
      p.B = B;
      p.k += 1;
      s.tau_reset = false;
      return info;
    }
  }
  throw LineSearchError("line search did not terminate after " + std::to_string(vp.max_trials) +
                        " trials at iteration " + std::to_string(p.k));
}

template <class Model>
StepInfo step(const Model &model, const VariantParams &vp, SolverState &s) {
  return vp.kind == Variant::linesearch ? linesearch_step(model, vp, s)
                                        : plain_or_old_grad_step(model, vp, s);
}

template <class Model>
RunResult drive(const Model &model, const VariantParams &vp, double beta0, VectorView x0,
                const RunOptions &opts) {
  if (opts.max_iter < 0) throw ParameterError("max_iter must be >= 0");
  if (opts.restart_every && *opts.restart_every < 1) {
    throw ParameterError("restart period must be >= 1");
  }
  RunResult res;
  res.L_f = model.L_f();
  res.M_norm_S = model.M_norm();
  SolverState s = make_state(model, beta0, x0);
  if (vp.kind == Variant::linesearch) s.params.B = vp.B0;
  if (opts.record_rows) res.rows.reserve(static_cast<std::size_t>(opts.max_iter));

  const auto t0 = Clock::now();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const bool need_metrics = opts.record_rows || opts.observer || opts.objective_change_tol > 0.0;
  double prev_objective = nan;
  for (long it = 0; it < opts.max_iter; ++it) {
    const StepInfo info = step(model, vp, s);
    if (it == 0) res.B1 = info.B;
    const Metrics m = need_metrics ? model.metrics(s.x_bar, info.beta_next, s.dot_y)
                                   : Metrics{nan, nan, std::nullopt};

    TraceRow row;
    row.k = it;
    row.objective = m.objective;
    row.smoothed_objective = m.smoothed_objective;
    row.infeasibility = m.infeasibility;
    row.tau = info.tau;
    row.beta = info.beta;
    row.B = info.B;
    row.grad_evals = s.grad_evals;
    row.prox_evals = s.prox_evals;
    row.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
    row.beta_next = info.beta_next;
    row.linesearch_ok = info.linesearch_ok;
    row.linesearch_trials = info.trials;
    row.line7_gap = info.line7_gap;
    row.reused_gradient = info.reused;
    if (opts.observer) opts.observer(row, s);
    if (opts.record_rows) res.rows.push_back(row);

    if (opts.restart_every && (it + 1) % *opts.restart_every == 0) {
      s.x_tilde = s.x_bar;
      s.x_hat = s.x_bar;
      s.dot_y = s.last_y_star;
      s.params.beta = beta0;
      s.params.tau = 1.0;
      s.tau_reset = true;
    }
    if (opts.objective_change_tol > 0.0 &&
        std::abs(m.objective - prev_objective) <=
            opts.objective_change_tol * (1.0 + std::abs(m.objective))) {
      break;
    }
    prev_objective = m.objective;
  }
  res.final_state = std::move(s);
  return res;
}

} // namespace

// ---------------------------------------------------------------------------

Metrics evaluate_metrics(const ProblemSpec &p, VectorView x, double beta, const Vector &center) {
  const SingleModel model(p, 0.0);
  require_same_size(static_cast<std::size_t>(center.size()),
                    static_cast<std::size_t>(p.M.out_dim()), "center");
  return model.metrics(x, beta, center);
}

Metrics evaluate_metrics(const ProblemSpec &p, VectorView x, double beta) {
  return evaluate_metrics(p, x, beta, center_or_zero(p.dot_y, p.M.out_dim(), "dot_y"));
}

SolverState init_state(const ProblemSpec &p, double beta0, VectorView x0) {
  return make_state(SingleModel(p, std::nullopt), beta0, x0);
}

SolverState asgard_step(SolverState state, const ProblemSpec &p) {
  const SingleModel model(p, state.params.M_norm_S);
  plain_or_old_grad_step(model, VariantParams{}, state);
  return state;
}

RunResult run_asgard(const ProblemSpec &p, double beta0, VectorView x0, const RunOptions &opts) {
  return drive(SingleModel(p, std::nullopt), VariantParams{}, beta0, x0, opts);
}

RunResult run_asgard_old_grad(const ProblemSpec &p, double beta0, VectorView x0, double sigma,
                              double delta, const RunOptions &opts) {
  if (!(p.f.lipschitz() > 0.0)) {
    throw ParameterError("old-gradients variant needs L_f > 0; use run_asgard for L_f = 0");
  }
  if (!(delta > 0.0)) throw ParameterError("delta must be positive");
  VariantParams vp;
  vp.kind = Variant::old_grad;
  vp.sigma = sigma;
  vp.delta = delta;
  return drive(SingleModel(p, std::nullopt), vp, beta0, x0, opts);
}

RunResult run_asgard_linesearch(const ProblemSpec &p, double beta0, VectorView x0, double a,
                                double B0, const RunOptions &opts, int max_trials) {
  if (!(a > 1.0)) throw ParameterError("line-search factor a must exceed 1");
  if (!(B0 > 0.0)) throw ParameterError("B0 must be positive");
  if (max_trials < 1) throw ParameterError("max_trials must be >= 1");
  VariantParams vp;
  vp.kind = Variant::linesearch;
  vp.a = a;
  vp.B0 = B0;
  vp.max_trials = max_trials;
  return drive(SingleModel(p, std::nullopt), vp, beta0, x0, opts);
}

RunResult run_parallel_asgard(const ParallelProblemSpec &p, double beta0, VectorView x0,
                              const RunOptions &opts) {
  return drive(BlockModel(p, opts.threads), VariantParams{}, beta0, x0, opts);
}

Runner restart_wrap(Runner inner, long q) {
  if (q < 1) throw ParameterError("restart period q must be >= 1");
  return [inner = std::move(inner), q](const RunOptions &opts) {
    RunOptions o = opts;
    o.restart_every = q;
    return inner(o);
  };
}

ParallelProblemSpec to_parallel(const ProblemSpec &p, int m) {
  const Index rows = p.M.out_dim();
  const Vector center = center_or_zero(p.dot_y, rows, "dot_y");
  std::vector<Index> sizes;
  std::vector<double> scalars;
  if (const auto *bs = std::get_if<Scaling::BlockScalar>(&p.S.kind())) {
    sizes = bs->sizes;
    scalars = bs->scalars;
  } else if (p.S.is_identity()) {
    if (m < 1 || m > rows) throw ParameterError("block count must lie in [1, out_dim]");
    for (int i = 0; i < m; ++i) {
      sizes.push_back(rows / m + (i < rows % m ? 1 : 0));
      scalars.push_back(1.0);
    }
  } else {
    throw CapabilityError("to_parallel supports S = identity or block_scalar");
  }
  const Matrix dense = p.M.to_dense();
  ParallelProblemSpec out{p.f, p.g, {}, std::nullopt};
  Index off = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const Scaling S = p.S.is_identity() ? Scaling::identity()
                                        : Scaling::block_scalar({sizes[i]}, {scalars[i]});
    out.blocks.push_back({p.h.restrict(off, sizes[i]),
                          LinearMap::dense(dense.middleRows(off, sizes[i])), S,
                          center.segment(off, sizes[i])});
    off += sizes[i];
  }
  return out;
}

} // namespace asgard
