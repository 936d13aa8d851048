#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "asgard/bench/bounds.hpp"
#include "asgard/bench/config.hpp"

namespace asgard::bench {

struct Oracle {
  double f_star;
  std::optional<Vector> x_star;
  std::optional<Vector> y_star;
};

struct OracleResult {
  double f_star;
  Vector x_star;
  std::optional<Vector> y_star; // constrained instances only
  long iters;
};

/// Restarted ASGARD (q = 100) for iters iterations followed by 100 plain
/// iterations. x* is the best iterate, or the last one for constrained
/// instances, and f_star = F(x*). y* is the dual iterate of a Vu-Condat run
/// of the same length.
OracleResult compute_oracle(const Instance &inst, long iters, VectorView x0);

void write_oracle(const OracleConfig &oc, const OracleResult &res);
/// Oracle data from the config and its files; empty when nothing is available.
std::optional<Oracle> load_oracle(const ExperimentConfig &cfg);

struct AlgorithmOutcome {
  AlgorithmConfig config;
  bool ok = false;
  std::string error;
  std::filesystem::path csv;
  std::vector<TraceRow> rows;
  double L_f = 0.0;
  double M_norm_S = 0.0;
  double B1 = 0.0;
  Vector x_final;
  std::vector<BoundCheck> bounds;
};

struct ExperimentResult {
  std::vector<AlgorithmOutcome> outcomes;
  std::filesystem::path summary_path;
  bool all_ok = true;
};

/// x0 from the config, or zeros.
Vector start_point(const ExperimentConfig &cfg, Index dim);

BoundContext make_bound_context(const Instance &inst, const AlgorithmConfig &alg, double L_f,
                                double M_norm_S, double B1, VectorView x0,
                                const std::optional<Oracle> &oracle);

/// Runs one algorithm; failures are captured in the outcome. Rows are
/// streamed to csv_path when it is non-empty.
AlgorithmOutcome run_algorithm(const ExperimentConfig &cfg, const Instance &inst,
                               const AlgorithmConfig &alg, const std::filesystem::path &csv_path,
                               const std::optional<Oracle> &oracle);

/// Runs every configured algorithm with up to `threads` workers, writes one
/// CSV per label and summary.json into out_dir (defaults to cfg.output_dir).
ExperimentResult run_experiment(const ExperimentConfig &cfg,
                                const std::optional<std::filesystem::path> &out_dir, int threads);

/// Worker count: hardware concurrency capped by BENCH_THREADS when set.
int worker_threads();

} // namespace asgard::bench
