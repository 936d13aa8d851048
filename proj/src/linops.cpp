#include "asgard/linops.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "asgard/errors.hpp"
#include "asgard/rng.hpp"

namespace asgard {

void require_same_size(std::size_t got, std::size_t expected, const char *what) {
  if (got != expected) {
    throw ShapeError(std::string(what) + ": expected length " + std::to_string(expected) +
                     ", got " + std::to_string(got));
  }
}

namespace {
template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;
} // namespace

LinearMap LinearMap::dense(Matrix matrix) {
  const Index rows = matrix.rows();
  const Index cols = matrix.cols();
  if (rows < 1 || cols < 1) throw ShapeError("dense operator must be non-empty");
  return LinearMap(Dense{std::make_shared<const Matrix>(std::move(matrix))}, cols, rows);
}

LinearMap LinearMap::identity(Index n) { return dense(Matrix::Identity(n, n)); }

LinearMap LinearMap::zero(Index out_dim, Index in_dim) {
  return dense(Matrix::Zero(out_dim, in_dim));
}

LinearMap LinearMap::diff1d(Index n) {
  if (n < 2) throw ShapeError("diff1d needs n >= 2");
  return LinearMap(Diff1d{n}, n, n - 1);
}

LinearMap LinearMap::stacked(std::vector<LinearMap> children) {
  if (children.empty()) throw ShapeError("stacked operator needs at least one child");
  const Index in = children.front().in_dim();
  std::vector<Index> offsets{0};
  for (const auto &c : children) {
    if (c.in_dim() != in) throw ShapeError("stacked children must share in_dim");
    offsets.push_back(offsets.back() + c.out_dim());
  }
  const Index out = offsets.back();
  return LinearMap(Stacked{std::move(children), std::move(offsets)}, in, out);
}

Vector LinearMap::apply(VectorView x) const {
  require_same_size(static_cast<std::size_t>(x.size()), static_cast<std::size_t>(in_dim_),
                    "LinearMap::apply");
  return std::visit(overloaded{
                        [&](const Dense &d) -> Vector { return (*d.matrix) * x; },
                        [&](const Diff1d &d) -> Vector {
                          return x.tail(d.n - 1) - x.head(d.n - 1);
                        },
                        [&](const Stacked &s) -> Vector {
                          Vector out(out_dim_);
                          for (std::size_t i = 0; i < s.children.size(); ++i) {
                            out.segment(s.offsets[i], s.children[i].out_dim()) =
                                s.children[i].apply(x);
                          }
                          return out;
                        },
                    },
                    kind_);
}

Vector LinearMap::adjoint(VectorView y) const {
  require_same_size(static_cast<std::size_t>(y.size()), static_cast<std::size_t>(out_dim_),
                    "LinearMap::adjoint");
  return std::visit(
      overloaded{
          [&](const Dense &d) -> Vector { return d.matrix->transpose() * y; },
          [&](const Diff1d &d) -> Vector {
            // (-y_1, y_1 - y_2, ..., y_{n-2} - y_{n-1}, y_{n-1})
            Vector out(d.n);
            out[0] = -y[0];
            for (Index i = 1; i < d.n - 1; ++i) out[i] = y[i - 1] - y[i];
            out[d.n - 1] = y[d.n - 2];
            return out;
          },
          [&](const Stacked &s) -> Vector {
            Vector out = s.children[0].adjoint(y.segment(0, s.children[0].out_dim()));
            for (std::size_t i = 1; i < s.children.size(); ++i) {
              out += s.children[i].adjoint(y.segment(s.offsets[i], s.children[i].out_dim()));
            }
            return out;
          },
      },
      kind_);
}

Matrix LinearMap::to_dense() const {
  return std::visit(overloaded{
                        [&](const Dense &d) -> Matrix { return *d.matrix; },
                        [&](const Diff1d &d) -> Matrix {
                          Matrix m = Matrix::Zero(d.n - 1, d.n);
                          for (Index i = 0; i < d.n - 1; ++i) {
                            m(i, i) = -1.0;
                            m(i, i + 1) = 1.0;
                          }
                          return m;
                        },
                        [&](const Stacked &s) -> Matrix {
                          Matrix m(out_dim_, in_dim_);
                          for (std::size_t i = 0; i < s.children.size(); ++i) {
                            m.middleRows(s.offsets[i], s.children[i].out_dim()) =
                                s.children[i].to_dense();
                          }
                          return m;
                        },
                    },
                    kind_);
}

// ---------------------------------------------------------------------------

Scaling Scaling::diagonal(Vector d) {
  if (d.size() < 1) throw ShapeError("diagonal scaling must be non-empty");
  if (!(d.array() > 0.0).all() || !d.allFinite()) {
    throw ParameterError("diagonal scaling entries must be positive and finite");
  }
  return Scaling(Diagonal{std::move(d)});
}

Scaling Scaling::block_scalar(std::vector<Index> sizes, std::vector<double> scalars) {
  if (sizes.empty() || sizes.size() != scalars.size()) {
    throw ShapeError("block_scalar needs one scalar per block");
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) throw ShapeError("block_scalar block sizes must be positive");
    if (!(scalars[i] > 0.0) || !std::isfinite(scalars[i])) {
      throw ParameterError("block_scalar scalars must be positive and finite");
    }
  }
  return Scaling(BlockScalar{std::move(sizes), std::move(scalars)});
}

Index Scaling::dim() const {
  return std::visit(overloaded{
                        [](const Identity &) -> Index { return -1; },
                        [](const Diagonal &d) -> Index { return d.d.size(); },
                        [](const BlockScalar &b) -> Index {
                          Index n = 0;
                          for (Index s : b.sizes) n += s;
                          return n;
                        },
                    },
                    kind_);
}

void Scaling::check_dim(Index n) const {
  const Index d = dim();
  if (d >= 0 && d != n) {
    throw ShapeError("scaling has dimension " + std::to_string(d) + ", vector has " +
                     std::to_string(n));
  }
}

Vector Scaling::apply(VectorView y) const {
  check_dim(y.size());
  return std::visit(overloaded{
                        [&](const Identity &) -> Vector { return y; },
                        [&](const Diagonal &d) -> Vector { return d.d.cwiseProduct(y); },
                        [&](const BlockScalar &b) -> Vector {
                          Vector out(y.size());
                          Index off = 0;
                          for (std::size_t i = 0; i < b.sizes.size(); ++i) {
                            out.segment(off, b.sizes[i]) = b.scalars[i] * y.segment(off, b.sizes[i]);
                            off += b.sizes[i];
                          }
                          return out;
                        },
                    },
                    kind_);
}

Vector Scaling::apply_inverse(VectorView y) const {
  check_dim(y.size());
  return std::visit(overloaded{
                        [&](const Identity &) -> Vector { return y; },
                        [&](const Diagonal &d) -> Vector { return y.cwiseQuotient(d.d); },
                        [&](const BlockScalar &b) -> Vector {
                          Vector out(y.size());
                          Index off = 0;
                          for (std::size_t i = 0; i < b.sizes.size(); ++i) {
                            out.segment(off, b.sizes[i]) = y.segment(off, b.sizes[i]) / b.scalars[i];
                            off += b.sizes[i];
                          }
                          return out;
                        },
                    },
                    kind_);
}

double Scaling::squared_norm(VectorView y) const {
  if (is_identity()) return y.squaredNorm();
  return y.dot(apply(y));
}

double Scaling::squared_inverse_norm(VectorView y) const {
  if (is_identity()) return y.squaredNorm();
  return y.dot(apply_inverse(y));
}

double Scaling::norm(VectorView y) const { return std::sqrt(squared_norm(y)); }
double Scaling::inverse_norm(VectorView y) const { return std::sqrt(squared_inverse_norm(y)); }

// ---------------------------------------------------------------------------

NormEstimate estimate_norm_S(const LinearMap &op, const Scaling &S, double tol, int max_iter,
                             std::uint64_t seed) {
  if (!(tol > 0.0)) throw ParameterError("estimate_norm_S: tol must be positive");
  if (max_iter < 1) throw ParameterError("estimate_norm_S: max_iter must be >= 1");
  if (S.dim() >= 0 && S.dim() != op.out_dim()) {
    throw ShapeError("estimate_norm_S: scaling does not match operator output dimension");
  }

  CounterRng rng(seed, streams::kPowerStart);
  Vector x = rng.normal_vector(op.in_dim());
  x.normalize();

  constexpr double kRounding = 8.0 * std::numeric_limits<double>::epsilon();
  NormEstimate est;
  double prev_increment = -1.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector mx = op.apply(x);
    const Vector smx = S.apply_inverse(mx);
    const double rho = mx.dot(smx);
    est.rayleigh.push_back(rho);
    est.iterations = it;
    if (rho == 0.0) {
      // x lies in the kernel; a Gaussian start hits it only if M = 0.
      est.value = 0.0;
      return est;
    }
    Vector w = op.adjoint(smx);
    const double wn = w.norm();
    if (wn == 0.0) {
      est.value = std::sqrt(rho);
      return est;
    }

    if (it >= 2) {
      const double increment = rho - est.rayleigh[it - 2];
      if (increment <= kRounding * rho) {
        est.value = std::sqrt(rho);
        return est;
      }
      if (prev_increment > 0.0) {
        const double ratio = increment / prev_increment;
        if (ratio < 1.0) {
          const double tail = increment * ratio / (1.0 - ratio);
          if (tail <= tol * rho) {
            est.value = std::sqrt(rho);
            return est;
          }
        }
      }
      prev_increment = increment;
    }
    x = w / wn;
  }
  const double last = std::sqrt(est.rayleigh.back());
  throw ConvergenceError("power iteration did not converge within " + std::to_string(max_iter) +
                             " iterations",
                         last);
}

double operator_norm(const LinearMap &op, const Scaling &S, std::uint64_t seed) {
  return estimate_norm_S(op, S, kNormTol, kNormMaxIter, seed).value * (1.0 + kNormTol);
}

} // namespace asgard
