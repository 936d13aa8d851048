#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "asgard/solvers.hpp"

namespace asgard {

/// 1/2 ||Ax - b||^2 + ||x||_1 + ||Dx||_1 with AR(rho) correlated rows of A.
struct SparseTvSpec {
  Index n;
  Index m;
  double rho;
};

/// min ||x||_1 subject to Ax = c with a planted +-1 sparse solution.
struct BasisPursuitSpec {
  Index n;
  Index m;
  Index sparsity;
};

/// ||Kx - p||_1 + (lambda / 2) x^T K x + (1 - lambda) ||x||_1 with a Laplacian kernel.
struct KernelL1Spec {
  Index n_points;
  Index feat_dim;
  double sigma_kernel;
  double lambda;
};

struct InstanceSpec {
  std::variant<SparseTvSpec, BasisPursuitSpec, KernelL1Spec> kind;
  std::uint64_t seed = 0;

  /// "sparse_tv_ls", "basis_pursuit" or "kernel_l1".
  std::string kind_name() const;
};

struct Instance {
  InstanceSpec spec;
  ProblemSpec problem;
  Matrix design;  // A, or K
  Vector data;    // b, c, or p
  Vector planted; // planted coefficients; empty for sparse_tv_ls
};

Instance gen_sparse_tv_ls(Index n, Index m, double rho, std::uint64_t seed);
Instance gen_basis_pursuit(Index n, Index m, Index sparsity, std::uint64_t seed);
Instance gen_kernel_l1(Index n_points, Index feat_dim, double sigma_kernel, double lambda,
                       std::uint64_t seed);
Instance generate(const InstanceSpec &spec);

/// JSON document with kind, seed, dims and base64 row-major float64 arrays.
std::string instance_to_json(const Instance &inst);
/// Rebuilds an instance from instance_to_json output without regenerating it.
Instance instance_from_json(const std::string &text);

std::string base64_encode_doubles(const double *data, std::size_t count);
std::vector<double> base64_decode_doubles(const std::string &text);

} // namespace asgard
