// Benchmark driver: run experiments, build oracles, check trace bounds.
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "asgard/bench/csv.hpp"
#include "asgard/bench/experiment.hpp"
#include "asgard/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitConfig = 2;

using namespace asgard;
using namespace asgard::bench;

int cmd_run(const std::string &config, const std::string &out) {
  const ExperimentConfig cfg = load_config(config);
  const auto dir = out.empty() ? std::optional<std::filesystem::path>() : std::filesystem::path(out);
  const ExperimentResult res = run_experiment(cfg, dir, worker_threads());
  for (const auto &o : res.outcomes) {
    if (o.ok) {
      std::printf("%-24s ok   final objective %.12g\n", o.config.label.c_str(),
                  o.rows.empty() ? 0.0 : o.rows.back().objective);
    } else {
      std::printf("%-24s FAIL %s\n", o.config.label.c_str(), o.error.c_str());
    }
  }
  std::printf("summary: %s\n", res.summary_path.string().c_str());
  return res.all_ok ? kExitOk : kExitSolver;
}

int cmd_oracle(const std::string &config, long iters) {
  ExperimentConfig cfg = load_config(config);
  if (!cfg.oracle) {
    OracleConfig oc;
    oc.x_star_path = cfg.output_dir / "oracle_x.json";
    oc.y_star_path = cfg.output_dir / "oracle_y.json";
    cfg.oracle = oc;
  }
  if (iters < 1) iters = cfg.oracle->iters;
  const Instance inst = generate(cfg.instance);
  const OracleResult res = compute_oracle(inst, iters, start_point(cfg, inst.problem.M.in_dim()));
  write_oracle(*cfg.oracle, res);
  std::printf("f_star %.17g\nx_star %s\n", res.f_star, cfg.oracle->x_star_path.string().c_str());
  if (res.y_star) std::printf("y_star %s\n", cfg.oracle->y_star_path.string().c_str());
  return kExitOk;
}

int cmd_check(const std::string &config, const std::string &trace, std::string label) {
  const ExperimentConfig cfg = load_config(config);
  if (label.empty()) label = std::filesystem::path(trace).stem().string();
  const AlgorithmConfig *alg = nullptr;
  for (const auto &a : cfg.algorithms) {
    if (a.label == label) alg = &a;
  }
  if (alg == nullptr) throw ConfigError("config: no algorithm labelled '" + label + "'");
  const auto rows = read_trace(trace);
  const Instance inst = generate(cfg.instance);
  const ProblemSpec &p = inst.problem;
  const double L_f = p.f.lipschitz();
  const double Mn = alg->name == "vu_condat" ? operator_norm(p.M) : operator_norm(p.M, p.S);
  const double B1 = rows.empty() ? 0.0 : rows.front().B;
  const auto ctx = make_bound_context(inst, *alg, L_f, Mn, B1, start_point(cfg, p.M.in_dim()),
                                      load_oracle(cfg));
  bool all = true;
  for (const auto &c : check_bounds(rows, ctx)) {
    if (!c.checkable) {
      std::printf("%-28s not checkable: %s\n", c.name.c_str(), c.reason.c_str());
      continue;
    }
    all = all && c.passed();
    std::printf("%-28s %s rows=%ld violations=%ld max_excess=%.3e", c.name.c_str(),
                c.passed() ? "PASS" : "FAIL", c.rows_checked, c.violations, c.max_excess);
    if (c.value) std::printf(" value=%.6f", *c.value);
    std::printf("\n");
  }
  return all ? kExitOk : kExitSolver;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"ASGARD benchmark harness"};
  app.require_subcommand(1);

  std::string config, out, trace, label;
  long iters = 0;
  auto *run = app.add_subcommand("run", "run the configured algorithms and write CSV traces");
  run->add_option("--config", config, "experiment config (JSON)")->required();
  run->add_option("--out", out, "output directory (overrides output_dir)");

  auto *oracle = app.add_subcommand("oracle", "compute reference solutions for bound checks");
  oracle->add_option("--config", config, "experiment config (JSON)")->required();
  oracle->add_option("--iters", iters, "iterations of the restarted reference run");

  auto *check = app.add_subcommand("check", "evaluate convergence bounds on a trace");
  check->add_option("--config", config, "experiment config (JSON)")->required();
  check->add_option("--trace", trace, "trace CSV")->required();
  check->add_option("--algorithm", label, "algorithm label (defaults to the CSV file stem)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, out);
    if (*oracle) return cmd_oracle(config, iters);
    return cmd_check(config, trace, label);
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}
