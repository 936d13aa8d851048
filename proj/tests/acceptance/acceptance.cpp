// End-to-end acceptance gate. Prints one PASS/FAIL line per criterion and
// exits non-zero when a blocking criterion fails.
// Usage: acceptance <path-to-bench>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "asgard/baseline.hpp"
#include "asgard/bench/csv.hpp"
#include "asgard/bench/experiment.hpp"
#include "asgard/problems.hpp"
#include "asgard/schedule.hpp"
#include "asgard/smoothing.hpp"
#include "asgard/solvers.hpp"
#include "sampling.hpp"
#include "schedule_suite.hpp"
#include "smoothing_suite.hpp"

using namespace asgard;
using testing_support::Sampler;

namespace {

constexpr double kScheduleSlack = 1e-12;
constexpr double kCubicTol = 1e-12;
constexpr double kCubicResidual = 1e-14;
constexpr double kDbetaRel = 1e-5;
constexpr double kGradRel = 1e-6;
constexpr double kMoreauTol = 1e-12;
constexpr double kRateSlack = 1e-8;       // times (1 + |F*|)
constexpr double kConstrainedSlack = 1e-6; // times max(1, |rhs|)
constexpr double kSlopeLimit = -0.9;
constexpr double kExitTestRel = 1e-12;
constexpr long kZetaTerms = 1000000;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  double limit_s;
  bool blocking;
  std::function<Outcome()> body;
};

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

RunOptions iters(long n) {
  RunOptions o;
  o.max_iter = n;
  return o;
}

struct Reference {
  double f_star;
  Vector x_star;
  std::optional<Vector> y_star;
};

Reference oracle(const Instance &inst, long n) {
  const auto r = bench::compute_oracle(inst, n, Vector::Zero(inst.problem.M.in_dim()));
  return {r.f_star, r.x_star, r.y_star};
}

// Max over rows of lhs - rhs; <= 0 when every row satisfies its inequality.
double worst_row(const std::vector<TraceRow> &rows, const std::function<double(const TraceRow &)> &excess) {
  double w = -std::numeric_limits<double>::infinity();
  for (const auto &r : rows) {
    const double e = excess(r);
    w = std::isnan(e) ? std::numeric_limits<double>::infinity() : std::max(w, e);
  }
  return w;
}

double zeta(double s) {
  double sum = 0.0;
  for (long i = kZetaTerms; i >= 1; --i) sum += std::pow(static_cast<double>(i), -s);
  return sum;
}

bool same_rows(const std::vector<TraceRow> &a, const std::vector<TraceRow> &b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].objective != b[i].objective || a[i].smoothed_objective != b[i].smoothed_objective ||
        a[i].tau != b[i].tau || a[i].beta != b[i].beta || a[i].B != b[i].B) {
      return false;
    }
  }
  return true;
}

void archive(const std::filesystem::path &dir, const std::string &name, const std::vector<TraceRow> &rows) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / (name + ".csv"));
  bench::write_trace(out, rows);
}

// Instance shared by criteria 9 and 10.
const Instance &tv100() {
  static const Instance inst = gen_sparse_tv_ls(100, 50, 0.95, 0);
  return inst;
}

const Reference &tv100_oracle() {
  static const Reference ref = oracle(tv100(), 200000);
  return ref;
}

Outcome parameter_bounds() {
  Sampler rng(1001);
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < 20; ++t) {
    const double L = rng.log_uniform(1e-3, 1e3);
    const double Mn = rng.log_uniform(1e-3, 1e3);
    const double b0 = rng.log_uniform(1e-3, 1e3);
    const auto s = testing_support::algorithm1_sequence(L, Mn, b0, 10000);
    worst = std::max(worst, testing_support::parameter_bound_excess(s, 10000, kScheduleSlack));
  }
  return {worst <= 0.0, "20 settings, k <= 1e4, worst excess " + fmt("%.3e", worst)};
}

Outcome cubic_exactness() {
  const auto P = [](double t, double tau, double alpha) {
    return alpha * t * t * t + t * t + tau * tau * t - tau * tau;
  };
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  const double err = std::abs(next_tau_cubic(1.0, 0.0) - golden);
  double worst = 0.0;
  long roots = 0;
  for (int i = 1; i <= 200; ++i) {
    const double tau = i / 200.0;
    for (int j = 0; j <= 100; ++j) {
      const double alpha = j / 100.0;
      worst = std::max(worst, std::abs(P(next_tau_cubic(tau, alpha), tau, alpha)));
      ++roots;
    }
  }
  for (double tau : {1e-3, 1e-5, 1e-7, 1e-9}) {
    for (double alpha : {0.0, 0.5, 1.0}) {
      worst = std::max(worst, std::abs(P(next_tau_cubic(tau, alpha), tau, alpha)));
      ++roots;
    }
  }
  return {err <= kCubicTol && worst <= kCubicResidual,
          "golden-ratio error " + fmt("%.2e", err) + ", max |P| " + fmt("%.2e", worst) + " over " +
              std::to_string(roots) + " roots"};
}

Outcome smoothing_calculus() {
  Sampler rng(1003);
  bool ok = true;
  std::string worst_label;
  double worst = -std::numeric_limits<double>::infinity();
  double dbeta = 0.0, grad = 0.0;
  unsigned long long seed = 2000;
  for (const auto &c : testing_support::smoothing_cases(rng)) {
    const auto r = testing_support::run_smoothing_suite(c, 10000, seed++);
    const double w = std::max({r.beta_monotone, r.cocoercive, r.below_h, r.combine_tau, r.lipschitz, r.upper});
    if (w > worst) worst = w, worst_label = c.label;
    dbeta = std::max(dbeta, r.dbeta_rel);
    grad = std::max(grad, r.grad_rel);
    ok = ok && w <= 0.0 && r.dbeta_rel <= kDbetaRel && r.grad_rel <= kGradRel && r.samples == 10000;
  }
  return {ok, "1e4 samples per case, worst excess " + fmt("%.2e", worst) + " (" + worst_label +
                  "), d/dbeta rel " + fmt("%.2e", dbeta) + ", grad rel " + fmt("%.2e", grad)};
}

Outcome moreau() {
  const Index n = 6;
  Sampler rng(1004);
  const Vector lo = -rng.normal_vector(n).cwiseAbs();
  const Vector hi = rng.normal_vector(n).cwiseAbs();
  const std::vector<Proximable> kinds = {Proximable::l1(0.7),
                                         Proximable::group_l21(1.3, 3),
                                         Proximable::indicator_point(rng.normal_vector(n)),
                                         Proximable::indicator_box(lo, hi),
                                         Proximable::l1_shifted(rng.normal_vector(n), 1.1),
                                         Proximable::zero()};
  double worst = 0.0;
  for (const auto &fn : kinds) {
    for (int t = 0; t < 1000; ++t) {
      const Vector x = rng.normal_vector(n, 3.0);
      const double gamma = rng.log_uniform(1e-3, 1e3);
      const Vector rebuilt = fn.prox(x, gamma) + gamma * fn.conjugate_prox(x / gamma, 1.0 / gamma);
      worst = std::max(worst, (rebuilt - x).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= kMoreauTol, std::to_string(kinds.size()) + " kinds x 1e3 samples, max error " + fmt("%.2e", worst)};
}

Outcome rate_algorithm1() {
  const Instance inst = gen_sparse_tv_ls(20, 10, 0.95, 0);
  const Reference ref = oracle(inst, 1000000);
  const auto run = run_asgard(inst.problem, 1.0, Vector::Zero(20), iters(5000));
  const double R2 = ref.x_star.squaredNorm();
  const double B1 = run.rows.front().B;
  const double slack = kRateSlack * (1.0 + std::abs(ref.f_star));
  const double w = worst_row(run.rows, [&](const TraceRow &r) {
    return r.smoothed_objective - ref.f_star - (B1 * R2 / (2.0 * (r.k + 1.0)) + slack);
  });
  return {w <= 0.0 && run.rows.size() == 5000,
          "F* " + fmt("%.12g", ref.f_star) + ", worst excess " + fmt("%.3e", w)};
}

Outcome constrained_bounds() {
  const Instance inst = gen_basis_pursuit(40, 20, 5, 1);
  const ProblemSpec &p = inst.problem;
  const Reference ref = oracle(inst, 1000000);
  if (!ref.y_star) return {false, "oracle produced no dual solution"};
  const double beta0 = 1.0;
  const auto run = run_asgard(p, beta0, Vector::Zero(40), iters(10000));
  const double Mn = run.M_norm_S;
  const double Lhat = 0.5 * run.L_f + Mn * Mn / (2.0 * beta0);
  const double R2 = ref.x_star.squaredNorm();
  const double ys = ref.y_star->norm(); // S = I and dot_y = 0
  const auto rel = [](double rhs) { return kConstrainedSlack * std::max(1.0, std::abs(rhs)); };
  const double lower = worst_row(run.rows, [&](const TraceRow &r) {
    const double rhs = ys * *r.infeasibility;
    return ref.f_star - r.objective - (rhs + rel(rhs));
  });
  const double upper = worst_row(run.rows, [&](const TraceRow &r) {
    const double k1 = r.k + 1.0;
    const double rhs = Lhat * R2 / k1 + ys * *r.infeasibility + beta0 / (2.0 * k1) * ys * ys;
    return r.objective - ref.f_star - (rhs + rel(rhs));
  });
  const double infeas = worst_row(run.rows, [&](const TraceRow &r) {
    const double rhs = beta0 / (r.k + 1.0) * (ys + std::sqrt(ys * ys + 2.0 / beta0 * Lhat * R2));
    return *r.infeasibility - (rhs + rel(rhs));
  });
  // Least-squares slope of log infeasibility against log(k + 1) for k + 1 in [1e2, 1e4].
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (const auto &r : run.rows) {
    const double it = r.k + 1.0;
    if (it < 100 || it > 10000) continue;
    const double x = std::log(it), y = std::log(*r.infeasibility);
    sx += x, sy += y, sxx += x * x, sxy += x * y, n += 1;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const bool ok = lower <= 0.0 && upper <= 0.0 && infeas <= 0.0 && slope <= kSlopeLimit;
  return {ok, "excess lower " + fmt("%.2e", lower) + ", upper " + fmt("%.2e", upper) + ", infeasibility " +
                  fmt("%.2e", infeas) + ", slope " + fmt("%.4f", slope)};
}

Outcome equivalences() {
  const ProblemSpec p = gen_sparse_tv_ls(20, 10, 0.95, 0).problem;
  std::vector<Vector> xa, xb;
  RunOptions o = iters(500);
  o.observer = [&](const TraceRow &, const SolverState &s) { xa.push_back(s.x_bar); };
  const auto a = run_asgard(p, 1.0, Vector::Zero(20), o);
  o.observer = [&](const TraceRow &, const SolverState &s) { xb.push_back(s.x_bar); };
  const auto b = run_asgard_old_grad(p, 1.0, Vector::Zero(20), -1.0, 0.5, o);
  const bool old_ok = same_rows(a.rows, b.rows) && xa == xb;

  Sampler rng(1007);
  const Matrix M1 = p.M.to_dense();
  const Matrix M2 = rng.normal_matrix(7, 20);
  ProblemSpec stacked{p.f, p.g, Proximable::l1(1.0),
                      LinearMap::stacked({LinearMap::dense(M1), LinearMap::dense(M2)}),
                      Scaling::block_scalar({19, 7}, {1.0, 2.5})};
  const double norm = operator_norm(stacked.M, stacked.S);
  stacked.m_norm_s = norm;
  ParallelProblemSpec pp = to_parallel(stacked, 2);
  pp.m_norm_s = norm;
  const auto c = run_asgard(stacked, 1.0, Vector::Zero(20), iters(500));
  const auto d = run_parallel_asgard(pp, 1.0, Vector::Zero(20), iters(500));
  RunOptions two = iters(500);
  two.threads = 2;
  const auto e = run_parallel_asgard(pp, 1.0, Vector::Zero(20), two);
  const bool par_ok = pp.blocks.size() == 2 && same_rows(c.rows, d.rows) && same_rows(d.rows, e.rows) &&
                      c.final_state.x_bar == d.final_state.x_bar;
  return {old_ok && par_ok, std::string("old gradients (sigma < 0) ") + (old_ok ? "identical" : "differ") +
                                ", two-block parallel vs stacked " + (par_ok ? "identical" : "differ")};
}

Outcome linesearch_contracts() {
  const Instance inst = gen_sparse_tv_ls(50, 25, 0.95, 2);
  const ProblemSpec &p = inst.problem;
  const Reference ref = oracle(inst, 200000);
  const double a = 2.0, beta0 = 1.0;
  const double L = p.f.lipschitz();
  const double Mn = operator_norm(p.M, p.S);
  ProblemSpec q = p;
  q.m_norm_s = Mn;
  double exit_worst = -std::numeric_limits<double>::infinity();
  long accepted = 0;
  RunOptions o = iters(2000);
  o.observer = [&](const TraceRow &row, const SolverState &s) {
    const SmoothedConjugate hb(p.h, row.beta_next, s.dot_y, p.S);
    const auto [h_bar, gbar] = composite_value_grad(hb, p.M, s.x_bar);
    const auto [h_hat, v] = composite_value_grad(hb, p.M, s.x_hat);
    const Vector dx = s.x_bar - s.x_hat;
    const double lhs = p.f.value(s.x_bar) + h_bar;
    const double rhs = p.f.value(s.x_hat) + h_hat + (p.f.gradient(s.x_hat) + v).dot(dx) + 0.5 * row.B * dx.squaredNorm();
    exit_worst = std::max(exit_worst, (lhs - rhs) / (1.0 + std::abs(rhs)) - kExitTestRel);
    ++accepted;
  };
  const auto run = run_asgard_linesearch(q, beta0, Vector::Zero(50), a, update_B(L, Mn, beta0), o);
  const double B_w = worst_row(run.rows, [&](const TraceRow &r) {
    const double rhs = a * (L + Mn * Mn / r.beta_next);
    return (r.B - rhs) / rhs - kScheduleSlack;
  });
  const double tau_w = worst_row(run.rows, [&](const TraceRow &r) { return r.tau - 2.0 / (r.k + 2.0) - kScheduleSlack; });
  const double R2 = ref.x_star.squaredNorm();
  const double B1 = run.rows.front().B;
  const double slack = kRateSlack * (1.0 + std::abs(ref.f_star));
  const double rate_w = worst_row(run.rows, [&](const TraceRow &r) {
    return r.smoothed_objective - ref.f_star - (B1 * r.beta_next / beta0 * R2 + slack);
  });
  const bool ok = accepted == 2000 && exit_worst <= 0.0 && B_w <= 0.0 && tau_w <= 0.0 && rate_w <= 0.0;
  return {ok, "exit test " + fmt("%.2e", exit_worst) + ", B " + fmt("%.2e", B_w) + ", tau " + fmt("%.2e", tau_w) +
                  ", rate " + fmt("%.2e", rate_w)};
}

Outcome old_gradient_efficiency() {
  const ProblemSpec &p = tv100().problem;
  const Reference &ref = tv100_oracle();
  const double sigma = 1.0, delta = 0.5;
  const auto plain = run_asgard(p, 1.0, Vector::Zero(100), iters(10000));
  const auto old = run_asgard_old_grad(p, 1.0, Vector::Zero(100), sigma, delta, iters(10000));
  const double B1 = old.rows.front().B;
  const double extra = sigma * std::pow(B1 / (2.0 * old.L_f), 1.0 + delta) * zeta(1.0 + delta);
  const double R2 = ref.x_star.squaredNorm();
  const double slack = kRateSlack * (1.0 + std::abs(ref.f_star));
  const double w = worst_row(old.rows, [&](const TraceRow &r) {
    return r.smoothed_objective - ref.f_star - (B1 / (r.k + 1.0) * (0.5 * R2 + extra) + slack);
  });
  const long ga = plain.final_state.grad_evals, gb = old.final_state.grad_evals;
  return {gb < ga && w <= 0.0, "grad_evals " + std::to_string(gb) + " vs " + std::to_string(ga) +
                                   ", bound excess " + fmt("%.3e", w)};
}

Outcome qualitative() {
  const ProblemSpec &p = tv100().problem;
  const double f_star = tv100_oracle().f_star;
  const Vector x0 = Vector::Zero(100);
  const auto plain = run_asgard(p, 1.0, x0, iters(10000));
  RunOptions ro = iters(10000);
  ro.restart_every = 100;
  const auto restarted = run_asgard(p, 1.0, x0, ro);
  const auto vc = run_vu_condat(p, VuCondatConfig::defaults(p.f.lipschitz(), operator_norm(p.M), 10000), x0,
                                Vector::Zero(p.M.out_dim()));
  const std::filesystem::path dir = "acceptance_traces";
  archive(dir, "asgard", plain.rows);
  archive(dir, "asgard_restart", restarted.rows);
  archive(dir, "vu_condat", vc.rows);
  const double g_plain = plain.rows.back().objective - f_star;
  const double g_rest = restarted.rows.back().objective - f_star;
  const double g_vc = vc.rows.back().objective - f_star;
  return {g_rest <= g_plain && g_rest <= g_vc, "final gaps restart " + fmt("%.3e", g_rest) + ", plain " +
                                                    fmt("%.3e", g_plain) + ", vu_condat " + fmt("%.3e", g_vc) +
                                                    "; traces in " + dir.string()};
}

std::string numeric_columns(const std::filesystem::path &csv) {
  std::ifstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

Outcome determinism(const char *bench) {
  if (bench == nullptr) return {false, "bench executable path not given"};
  const auto dir = std::filesystem::path("acceptance_determinism");
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream cfg(dir / "config.json");
    cfg << R"({
  "instance": {"kind": "sparse_tv_ls", "n": 100, "m": 50, "rho": 0.95, "seed": 0},
  "algorithms": [
    {"name": "asgard"},
    {"name": "asgard", "label": "asgard_restart", "q_restart": 100},
    {"name": "asgard_old_grad", "sigma": 1, "delta": 0.5},
    {"name": "asgard_linesearch", "a": 2},
    {"name": "parallel_asgard", "blocks": 2},
    {"name": "vu_condat"}
  ],
  "max_iter": 2000
})";
  }
  for (const char *run : {"a", "b"}) {
    const std::string cmd = std::string("\"") + bench + "\" run --config " + (dir / "config.json").string() +
                            " --out " + (dir / run).string() + " > " + (dir / run).string() + ".log 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, std::string("bench run ") + run + " failed"};
  }
  long files = 0;
  for (const auto &entry : std::filesystem::directory_iterator(dir / "a")) {
    if (entry.path().extension() != ".csv") continue;
    const auto other = dir / "b" / entry.path().filename();
    if (!std::filesystem::exists(other)) return {false, "missing " + other.string()};
    if (numeric_columns(entry.path()) != numeric_columns(other)) {
      return {false, entry.path().filename().string() + " differs"};
    }
    ++files;
  }
  return {files == 6, std::to_string(files) + " traces identical apart from wall_time_s"};
}

} // namespace

int main(int argc, char **argv) {
  const char *bench = argc > 1 ? argv[1] : nullptr;
  const std::vector<Criterion> criteria = {
      {1, 1.0, true, parameter_bounds},
      {2, 0.1, true, cubic_exactness},
      {3, 10.0, true, smoothing_calculus},
      {4, 1.0, true, moreau},
      {5, 30.0, true, rate_algorithm1},
      {6, 60.0, true, constrained_bounds},
      {7, 5.0, true, equivalences},
      {8, 30.0, true, linesearch_contracts},
      {9, 60.0, true, old_gradient_efficiency},
      {10, 120.0, false, qualitative},
      {11, 10.0, true, [bench] { return determinism(bench); }},
  };
  bool all = true;
  for (const auto &c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    std::printf("criterion %2d: %s  %s; %.3f s (limit %g s)%s\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs, c.limit_s, !pass && !c.blocking ? " [warning only]" : "");
    std::fflush(stdout);
    if (c.blocking) all = all && pass;
  }
  return all ? 0 : 1;
}
