#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace testing_support {

/// Test-side sampler, deliberately separate from the library generator.
class Sampler {
public:
  explicit Sampler(unsigned long long seed) : eng_(seed) {}

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(eng_); }

  Eigen::VectorXd normal_vector(Eigen::Index n, double scale = 1.0) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * normal();
    return v;
  }
  Eigen::MatrixXd normal_matrix(Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }

private:
  std::mt19937_64 eng_;
};

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

} // namespace testing_support
