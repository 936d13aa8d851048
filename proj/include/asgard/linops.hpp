#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace asgard {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using VectorView = Eigen::Ref<const Eigen::VectorXd>;

/// A bounded linear operator R^in_dim -> R^out_dim with its adjoint.
///
/// Immutable once built; copies share the underlying storage.
class LinearMap {
public:
  struct Dense {
    std::shared_ptr<const Matrix> matrix;
  };
  /// Forward differences (x_2 - x_1, ..., x_n - x_{n-1}), no wrap-around.
  struct Diff1d {
    Index n;
  };
  /// Vertical stack; child outputs occupy contiguous slices in child order.
  struct Stacked {
    std::vector<LinearMap> children;
    std::vector<Index> offsets; // offsets[i] = start of child i, back() = out_dim
  };
  using Kind = std::variant<Dense, Diff1d, Stacked>;

  static LinearMap dense(Matrix matrix);
  static LinearMap identity(Index n);
  static LinearMap zero(Index out_dim, Index in_dim);
  static LinearMap diff1d(Index n);
  static LinearMap stacked(std::vector<LinearMap> children);

  Index in_dim() const noexcept { return in_dim_; }
  Index out_dim() const noexcept { return out_dim_; }
  const Kind &kind() const noexcept { return kind_; }

  Vector apply(VectorView x) const;
  Vector adjoint(VectorView y) const;

  /// Materializes the operator as an out_dim x in_dim matrix.
  Matrix to_dense() const;

private:
  LinearMap(Kind kind, Index in_dim, Index out_dim)
      : kind_(std::move(kind)), in_dim_(in_dim), out_dim_(out_dim) {}

  Kind kind_;
  Index in_dim_;
  Index out_dim_;
};

/// Positive definite scaling S on the dual space.
///
/// Only three shapes are representable: the identity, a positive diagonal, and
/// a scalar multiple of the identity on each of a list of contiguous blocks.
class Scaling {
public:
  struct Identity {};
  struct Diagonal {
    Vector d;
  };
  struct BlockScalar {
    std::vector<Index> sizes;
    std::vector<double> scalars;
  };
  using Kind = std::variant<Identity, Diagonal, BlockScalar>;

  Scaling() = default;
  static Scaling identity() { return Scaling{}; }
  static Scaling diagonal(Vector d);
  static Scaling block_scalar(std::vector<Index> sizes, std::vector<double> scalars);

  const Kind &kind() const noexcept { return kind_; }
  bool is_identity() const noexcept { return std::holds_alternative<Identity>(kind_); }

  /// Dimension the scaling is tied to, or -1 for the identity (any dimension).
  Index dim() const;

  Vector apply(VectorView y) const;         // S y
  Vector apply_inverse(VectorView y) const; // S^-1 y
  double norm(VectorView y) const;          // ||y||_S
  double inverse_norm(VectorView y) const;  // ||y||_{S^-1}
  double squared_norm(VectorView y) const;
  double squared_inverse_norm(VectorView y) const;

private:
  explicit Scaling(Kind kind) : kind_(std::move(kind)) {}
  void check_dim(Index n) const;

  Kind kind_ = Identity{};
};

struct NormEstimate {
  double value = 0.0; // estimate of ||M||_{S^-1}
  int iterations = 0;
  /// Rayleigh quotients ||M x_k||^2_{S^-1} for the unit iterates x_k.
  std::vector<double> rayleigh;
};

/// Power iteration on x -> M* S^-1 M x from a seeded Gaussian start.
///
/// Stops once the extrapolated remaining increase of the Rayleigh quotient
/// (geometric tail of the last two increments) falls below tol times the
/// current value, or once increments reach rounding level. Throws
/// ConvergenceError if neither happens within max_iter iterations.
NormEstimate estimate_norm_S(const LinearMap &op, const Scaling &S, double tol,
                             int max_iter, std::uint64_t seed);

inline constexpr double kNormTol = 1e-9;
inline constexpr int kNormMaxIter = 10000;

/// ||M||_{S^-1} estimated with the default tolerance and inflated by (1 + tol)
/// so it can be used directly inside smoothness constants.
double operator_norm(const LinearMap &op, const Scaling &S = Scaling::identity(),
                     std::uint64_t seed = 0);

} // namespace asgard
