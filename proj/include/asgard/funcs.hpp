#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "asgard/linops.hpp"

namespace asgard {

/// Componentwise sign(x_i) * max(|x_i| - t, 0).
Vector soft_threshold(VectorView x, double t);

/// A proper closed convex function with a closed-form prox and conjugate prox.
///
/// Conjugate proxes are implemented directly from the conjugate's closed form
/// (a projection or shift) rather than through Moreau's identity, so that the
/// identity can be used as an independent check.
class Proximable {
public:
  struct L1 {
    double weight;
  };
  /// weight * sum_g ||x_g||_2 over consecutive groups of group_size entries.
  struct GroupL21 {
    double weight;
    Index group_size;
  };
  struct IndicatorPoint {
    Vector c;
  };
  struct IndicatorBox {
    Vector lo;
    Vector hi;
  };
  /// weight * ||x - p||_1
  struct L1Shifted {
    Vector p;
    double weight;
  };
  struct Zero {};
  using Kind = std::variant<L1, GroupL21, IndicatorPoint, IndicatorBox, L1Shifted, Zero>;

  static Proximable l1(double weight);
  static Proximable group_l21(double weight, Index group_size);
  static Proximable indicator_point(Vector c);
  static Proximable indicator_box(Vector lo, Vector hi);
  static Proximable l1_shifted(Vector p, double weight);
  static Proximable zero();

  const Kind &kind() const noexcept { return kind_; }
  std::string name() const;

  /// Dimension fixed by the function's data, if any.
  std::optional<Index> dim() const;

  /// Function value; +infinity outside the domain.
  double value(VectorView x) const;
  /// argmin_z fn(z) + ||z - x||^2 / (2 gamma).
  Vector prox(VectorView x, double gamma) const;
  /// prox of gamma * fn^*, the Fenchel conjugate.
  Vector conjugate_prox(VectorView x, double gamma) const;
  /// fn^*(u) in closed form; +infinity outside dom fn^* (checked with a
  /// 1e-12 relative tolerance so that projections land inside).
  double conjugate_value(VectorView u) const;

  /// The same function restricted to coordinates [offset, offset + len).
  /// Throws CapabilityError if the function does not split there.
  Proximable restrict(Index offset, Index len) const;

  /// Lipschitz constant in the Euclidean norm on R^dim, if finite.
  std::optional<double> lipschitz_bound(Index dim) const;

private:
  explicit Proximable(Kind kind) : kind_(std::move(kind)) {}
  void check_dim(Index n, const char *what) const;

  Kind kind_;
};

/// A convex differentiable term with Lipschitz gradient.
class SmoothTerm {
public:
  struct LeastSquares {
    LinearMap A;
    Vector b;
  };
  /// (lambda / 2) x^T K x with K symmetric positive semidefinite.
  struct QuadraticForm {
    std::shared_ptr<const Matrix> K;
    double lambda;
  };
  struct Zero {
    Index dim;
  };
  using Kind = std::variant<LeastSquares, QuadraticForm, Zero>;

  /// 1/2 ||A x - b||^2. L_f = ||A||^2 from power iteration unless given.
  static SmoothTerm least_squares(LinearMap A, Vector b,
                                  std::optional<double> lipschitz = std::nullopt);
  /// L_f = lambda * lambda_max(K) from power iteration unless given.
  static SmoothTerm quadratic_form(Matrix K, double lambda,
                                   std::optional<double> lipschitz = std::nullopt);
  static SmoothTerm zero(Index dim);

  const Kind &kind() const noexcept { return kind_; }
  Index dim() const noexcept { return dim_; }
  double lipschitz() const noexcept { return lipschitz_; }
  bool is_zero() const noexcept { return std::holds_alternative<Zero>(kind_); }

  double value(VectorView x) const;
  Vector gradient(VectorView x) const;
  std::pair<double, Vector> value_grad(VectorView x) const;

private:
  SmoothTerm(Kind kind, Index dim, double lipschitz)
      : kind_(std::move(kind)), dim_(dim), lipschitz_(lipschitz) {}

  Kind kind_;
  Index dim_;
  double lipschitz_;
};

} // namespace asgard
