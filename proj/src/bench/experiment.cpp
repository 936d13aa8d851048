#include "asgard/bench/experiment.hpp"

#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "asgard/baseline.hpp"
#include "asgard/bench/csv.hpp"
#include "asgard/errors.hpp"
#include "json.hpp"

namespace asgard::bench {

namespace {

using nlohmann::json;

constexpr long kOracleRestart = 100;
constexpr long kOracleRefine = 100;

bool is_constrained(const ProblemSpec &p) {
  return std::holds_alternative<Proximable::IndicatorPoint>(p.h.kind());
}

json vector_json(const Vector &v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector json_vector(const json &j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

json read_json_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

json bound_json(const BoundCheck &b) {
  json j{{"checkable", b.checkable}, {"passed", b.passed()}};
  if (!b.checkable) {
    j["reason"] = b.reason;
    return j;
  }
  j["rows_checked"] = b.rows_checked;
  j["violations"] = b.violations;
  j["max_excess"] = b.max_excess;
  if (b.first_violation >= 0) j["first_violation_k"] = b.first_violation;
  if (b.value) j["value"] = *b.value;
  return j;
}

} // namespace

OracleResult compute_oracle(const Instance &inst, long iters, VectorView x0) {
  const ProblemSpec &p = inst.problem;
  const bool constrained = is_constrained(p);
  RunOptions opts;
  opts.max_iter = iters;
  opts.restart_every = kOracleRestart;
  opts.record_rows = false;
  double best = std::numeric_limits<double>::infinity();
  Vector best_x = x0;
  const auto consider = [&](double objective, const Vector &x) {
    if (objective < best) {
      best = objective;
      best_x = x;
    }
  };
  if (!constrained) opts.observer = [&](const TraceRow &r, const SolverState &s) { consider(r.objective, s.x_bar); };
  RunResult res = run_asgard(p, 1.0, x0, opts);

  SolverState s = std::move(res.final_state);
  for (long i = 0; i < kOracleRefine; ++i) {
    s = asgard_step(std::move(s), p);
    if (!constrained) consider(evaluate_metrics(p, s.x_bar, s.params.beta, s.dot_y).objective, s.x_bar);
  }

  OracleResult out;
  out.iters = iters;
  out.x_star = constrained ? s.x_bar : best_x;
  out.f_star = evaluate_metrics(p, out.x_star, 1.0).objective;
  if (constrained) {
    const double L_f = p.f.lipschitz();
    const double Mn = operator_norm(p.M);
    const auto cfg = VuCondatConfig::defaults(L_f, Mn, iters);
    const auto vc = run_vu_condat(p, cfg, x0, Vector::Zero(p.M.out_dim()), false);
    out.y_star = vc.y;
  }
  return out;
}

void write_oracle(const OracleConfig &oc, const OracleResult &res) {
  const auto write = [](const std::filesystem::path &path, const json &j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
  };
  write(oc.x_star_path, json{{"f_star", res.f_star}, {"iters", res.iters}, {"x_star", vector_json(res.x_star)}});
  if (res.y_star) write(oc.y_star_path, json{{"iters", res.iters}, {"y_star", vector_json(*res.y_star)}});
}

std::optional<Oracle> load_oracle(const ExperimentConfig &cfg) {
  if (!cfg.oracle) return std::nullopt;
  const OracleConfig &oc = *cfg.oracle;
  std::optional<double> f_star = oc.f_star;
  std::optional<Vector> x_star;
  std::optional<Vector> y_star;
  if (std::filesystem::exists(oc.x_star_path)) {
    const json j = read_json_file(oc.x_star_path);
    x_star = json_vector(j.at("x_star"));
    if (!f_star) f_star = j.at("f_star").get<double>();
  }
  if (std::filesystem::exists(oc.y_star_path)) {
    y_star = json_vector(read_json_file(oc.y_star_path).at("y_star"));
  }
  if (!f_star) return std::nullopt;
  return Oracle{*f_star, std::move(x_star), std::move(y_star)};
}

Vector start_point(const ExperimentConfig &cfg, Index dim) {
  if (!cfg.x0) return Vector::Zero(dim);
  if (static_cast<Index>(cfg.x0->size()) != dim) {
    throw ConfigError("config: x0 has length " + std::to_string(cfg.x0->size()) + ", expected " +
                      std::to_string(dim));
  }
  return Eigen::Map<const Vector>(cfg.x0->data(), dim);
}

BoundContext make_bound_context(const Instance &inst, const AlgorithmConfig &alg, double L_f,
                                double M_norm_S, double B1, VectorView x0,
                                const std::optional<Oracle> &oracle) {
  const ProblemSpec &p = inst.problem;
  BoundContext ctx;
  ctx.algorithm = alg.name;
  ctx.restarted = alg.q_restart.has_value();
  ctx.beta0 = alg.beta0;
  ctx.sigma = alg.sigma;
  ctx.delta = alg.delta;
  ctx.a = alg.a;
  ctx.L_f = L_f;
  ctx.M_norm_S = M_norm_S;
  ctx.B1 = B1;
  ctx.constrained = is_constrained(p);
  ctx.D_Y = p.h.lipschitz_bound(p.M.out_dim());
  const Vector dot_y = p.dot_y.size() ? p.dot_y : Vector::Zero(p.M.out_dim());
  ctx.dot_y_norm_S = p.S.norm(dot_y);
  if (oracle) {
    ctx.f_star = oracle->f_star;
    if (oracle->x_star && oracle->x_star->size() == x0.size()) {
      ctx.dist_sq = (*oracle->x_star - x0).squaredNorm();
    }
    if (oracle->y_star && oracle->y_star->size() == p.M.out_dim()) {
      ctx.y_star_norm_S = p.S.norm(*oracle->y_star);
      ctx.y_gap_norm_S = p.S.norm(*oracle->y_star - dot_y);
    }
  }
  return ctx;
}

AlgorithmOutcome run_algorithm(const ExperimentConfig &cfg, const Instance &inst,
                               const AlgorithmConfig &alg, const std::filesystem::path &csv_path,
                               const std::optional<Oracle> &oracle) {
  AlgorithmOutcome out;
  out.config = alg;
  out.csv = csv_path;
  const ProblemSpec &p = inst.problem;
  const Vector x0 = start_point(cfg, p.M.in_dim());

  std::ofstream csv;
  if (!csv_path.empty()) {
    csv.open(csv_path);
    if (!csv) throw ConfigError("cannot write '" + csv_path.string() + "'");
    csv << kTraceHeader << '\n';
  }
  const auto stream_row = [&](const TraceRow &r) {
    if (csv.is_open()) csv << format_row(r) << '\n';
  };

  RunOptions opts;
  opts.max_iter = cfg.max_iter;
  opts.restart_every = alg.q_restart;
  opts.observer = [&](const TraceRow &r, const SolverState &) { stream_row(r); };
  try {
    RunResult res;
    if (alg.name == "asgard") {
      res = run_asgard(p, alg.beta0, x0, opts);
    } else if (alg.name == "asgard_old_grad") {
      res = run_asgard_old_grad(p, alg.beta0, x0, alg.sigma, alg.delta, opts);
    } else if (alg.name == "asgard_linesearch") {
      const double Mn = p.m_norm_s ? *p.m_norm_s : operator_norm(p.M, p.S);
      const double B0 = alg.B0_factor * update_B(p.f.lipschitz(), Mn, alg.beta0);
      ProblemSpec q = p;
      q.m_norm_s = Mn;
      res = run_asgard_linesearch(q, alg.beta0, x0, alg.a, B0, opts);
    } else if (alg.name == "parallel_asgard") {
      const ParallelProblemSpec pp = to_parallel(p, alg.blocks);
      res = run_parallel_asgard(pp, alg.beta0, x0, opts);
    } else if (alg.name == "vu_condat") {
      const double L_f = p.f.lipschitz();
      const double Mn = operator_norm(p.M);
      const VuCondatConfig vc =
          (alg.tau_p || alg.sigma_d)
              ? VuCondatConfig::make(alg.tau_p.value_or(0.0), alg.sigma_d.value_or(Mn > 0 ? 1.0 / Mn : 1.0),
                                     cfg.max_iter, L_f, Mn)
              : VuCondatConfig::defaults(L_f, Mn, cfg.max_iter);
      auto vr = run_vu_condat(p, vc, x0, Vector::Zero(p.M.out_dim()), true, stream_row);
      res.rows = std::move(vr.rows);
      res.final_state.x_bar = std::move(vr.x);
      res.L_f = L_f;
      res.M_norm_S = Mn;
    } else {
      throw ConfigError("unknown algorithm '" + alg.name + "'");
    }
    out.ok = true;
    out.rows = std::move(res.rows);
    out.L_f = res.L_f;
    out.M_norm_S = res.M_norm_S;
    out.B1 = out.rows.empty() ? 0.0 : out.rows.front().B;
    out.x_final = std::move(res.final_state.x_bar);
    out.bounds = check_bounds(out.rows, make_bound_context(inst, alg, out.L_f, out.M_norm_S, out.B1, x0, oracle));
  } catch (const Error &e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

int worker_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char *env = std::getenv("BENCH_THREADS")) {
    char *end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min<long>(n, cap);
  }
  return n;
}

ExperimentResult run_experiment(const ExperimentConfig &cfg,
                                const std::optional<std::filesystem::path> &out_dir, int threads) {
  const std::filesystem::path dir = out_dir.value_or(cfg.output_dir);
  std::filesystem::create_directories(dir);
  const Instance inst = generate(cfg.instance);
  const std::optional<Oracle> oracle = load_oracle(cfg);

  ExperimentResult result;
  result.outcomes.resize(cfg.algorithms.size());
  const std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
  for (std::size_t start = 0; start < cfg.algorithms.size(); start += workers) {
    const std::size_t stop = std::min(cfg.algorithms.size(), start + workers);
    std::vector<std::future<AlgorithmOutcome>> batch;
    for (std::size_t i = start; i < stop; ++i) {
      const auto &alg = cfg.algorithms[i];
      const auto csv = dir / (alg.label + ".csv");
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                 [&cfg, &inst, &alg, csv, &oracle] {
                                   return run_algorithm(cfg, inst, alg, csv, oracle);
                                 }));
    }
    for (std::size_t i = start; i < stop; ++i) result.outcomes[i] = batch[i - start].get();
  }

  json summary;
  summary["instance"] = {{"kind", cfg.instance.kind_name()}, {"seed", cfg.instance.seed}};
  summary["max_iter"] = cfg.max_iter;
  summary["f_star"] = oracle ? json(oracle->f_star) : json(nullptr);
  summary["algorithms"] = json::array();
  for (const auto &o : result.outcomes) {
    json a{{"label", o.config.label}, {"name", o.config.name}, {"ok", o.ok}, {"csv", o.csv.filename().string()}};
    if (!o.ok) {
      a["error"] = o.error;
      result.all_ok = false;
    } else if (!o.rows.empty()) {
      const TraceRow &last = o.rows.back();
      double best = last.objective;
      for (const auto &r : o.rows) best = std::min(best, r.objective);
      a["iterations"] = o.rows.size();
      a["final_objective"] = last.objective;
      a["best_objective"] = best;
      a["grad_evals"] = last.grad_evals;
      a["prox_evals"] = last.prox_evals;
      if (last.infeasibility) a["final_infeasibility"] = *last.infeasibility;
      if (oracle) {
        a["final_gap"] = last.objective - oracle->f_star;
        a["best_gap"] = best - oracle->f_star;
      }
      json b = json::object();
      for (const auto &c : o.bounds) b[c.name] = bound_json(c);
      a["bounds"] = b;
    }
    summary["algorithms"].push_back(a);
  }
  result.summary_path = dir / "summary.json";
  std::ofstream out(result.summary_path);
  out << summary.dump(2) << '\n';
  return result;
}

} // namespace asgard::bench
