#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "asgard/problems.hpp"

namespace asgard::bench {

/// Invalid experiment configuration; the message carries a line number.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct AlgorithmConfig {
  std::string name;  // asgard | asgard_old_grad | asgard_linesearch | parallel_asgard | vu_condat
  std::string label; // output file stem; defaults to name
  double beta0 = 1.0;
  std::optional<long> q_restart;
  double sigma = 1.0;     // asgard_old_grad
  double delta = 0.5;     // asgard_old_grad
  double a = 2.0;         // asgard_linesearch
  double B0_factor = 1.0; // asgard_linesearch: B0 = factor (L_f + ||M||^2 / beta0)
  int blocks = 2;         // parallel_asgard
  std::optional<double> tau_p;   // vu_condat
  std::optional<double> sigma_d; // vu_condat
};

struct OracleConfig {
  std::optional<double> f_star;
  std::filesystem::path x_star_path; // absolute after loading
  std::filesystem::path y_star_path;
  long iters = 100000;
};

struct ExperimentConfig {
  InstanceSpec instance;
  std::vector<AlgorithmConfig> algorithms;
  long max_iter = 1000;
  std::optional<OracleConfig> oracle;
  std::filesystem::path output_dir;
  std::optional<std::vector<double>> x0;
};

/// Parses a JSON config; relative paths resolve against base_dir.
ExperimentConfig parse_config(const std::string &text, const std::filesystem::path &base_dir);
ExperimentConfig load_config(const std::filesystem::path &path);

} // namespace asgard::bench
