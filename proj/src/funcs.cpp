#include "asgard/funcs.hpp"

#include <cmath>
#include <limits>

#include "asgard/errors.hpp"

namespace asgard {

namespace {

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDomainTol = 1e-12;

void check_step(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("prox step gamma must be positive and finite");
  }
}

void check_weight(double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("weight must be a finite nonnegative");
}

bool within_sup_ball(VectorView u, double radius) {
  const double bound = radius * (1.0 + kDomainTol);
  return u.size() == 0 || u.cwiseAbs().maxCoeff() <= bound;
}

Index check_groups(Index n, Index group_size) {
  if (n % group_size != 0) {
    throw ShapeError("group_l21: length " + std::to_string(n) + " is not a multiple of group size " +
                     std::to_string(group_size));
  }
  return n / group_size;
}

} // namespace

Vector soft_threshold(VectorView x, double t) {
  if (!(t >= 0.0)) throw ParameterError("soft_threshold: t must be nonnegative");
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]) - t;
    out[i] = a > 0.0 ? std::copysign(a, x[i]) : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------

Proximable Proximable::l1(double weight) {
  check_weight(weight);
  return Proximable(L1{weight});
}

Proximable Proximable::group_l21(double weight, Index group_size) {
  check_weight(weight);
  if (group_size < 1) throw ParameterError("group_l21: group_size must be >= 1");
  return Proximable(GroupL21{weight, group_size});
}

Proximable Proximable::indicator_point(Vector c) { return Proximable(IndicatorPoint{std::move(c)}); }

Proximable Proximable::indicator_box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) throw ShapeError("indicator_box: lo and hi differ in length");
  if (!(lo.array() <= hi.array()).all()) throw ParameterError("indicator_box: need lo <= hi");
  return Proximable(IndicatorBox{std::move(lo), std::move(hi)});
}

Proximable Proximable::l1_shifted(Vector p, double weight) {
  check_weight(weight);
  return Proximable(L1Shifted{std::move(p), weight});
}

Proximable Proximable::zero() { return Proximable(Zero{}); }

std::string Proximable::name() const {
  return std::visit(overloaded{
                        [](const L1 &) { return std::string("l1"); },
                        [](const GroupL21 &) { return std::string("group_l21"); },
                        [](const IndicatorPoint &) { return std::string("indicator_point"); },
                        [](const IndicatorBox &) { return std::string("indicator_box"); },
                        [](const L1Shifted &) { return std::string("l1_shifted"); },
                        [](const Zero &) { return std::string("zero"); },
                    },
                    kind_);
}

std::optional<Index> Proximable::dim() const {
  return std::visit(overloaded{
                        [](const IndicatorPoint &f) -> std::optional<Index> { return f.c.size(); },
                        [](const IndicatorBox &f) -> std::optional<Index> { return f.lo.size(); },
                        [](const L1Shifted &f) -> std::optional<Index> { return f.p.size(); },
                        [](const auto &) -> std::optional<Index> { return std::nullopt; },
                    },
                    kind_);
}

void Proximable::check_dim(Index n, const char *what) const {
  if (auto d = dim(); d && *d != n) {
    require_same_size(static_cast<std::size_t>(n), static_cast<std::size_t>(*d), what);
  }
  if (const auto *g = std::get_if<GroupL21>(&kind_)) check_groups(n, g->group_size);
}

double Proximable::value(VectorView x) const {
  check_dim(x.size(), "Proximable::value");
  return std::visit(
      overloaded{
          [&](const L1 &f) { return f.weight * x.lpNorm<1>(); },
          [&](const GroupL21 &f) {
            double s = 0.0;
            for (Index g = 0; g < x.size(); g += f.group_size) s += x.segment(g, f.group_size).norm();
            return f.weight * s;
          },
          [&](const IndicatorPoint &f) { return x == f.c ? 0.0 : kInf; },
          [&](const IndicatorBox &f) {
            return ((x.array() >= f.lo.array()) && (x.array() <= f.hi.array())).all() ? 0.0 : kInf;
          },
          [&](const L1Shifted &f) { return f.weight * (x - f.p).lpNorm<1>(); },
          [&](const Zero &) { return 0.0; },
      },
      kind_);
}

Vector Proximable::prox(VectorView x, double gamma) const {
  check_step(gamma);
  check_dim(x.size(), "Proximable::prox");
  return std::visit(
      overloaded{
          [&](const L1 &f) -> Vector { return soft_threshold(x, gamma * f.weight); },
          [&](const GroupL21 &f) -> Vector {
            Vector out(x.size());
            const double t = gamma * f.weight;
            for (Index g = 0; g < x.size(); g += f.group_size) {
              const double nrm = x.segment(g, f.group_size).norm();
              // Zero block at the origin: the shrinkage factor is taken as 0 there.
              const double factor = nrm > 0.0 ? std::max(1.0 - t / nrm, 0.0) : 0.0;
              out.segment(g, f.group_size) = factor * x.segment(g, f.group_size);
            }
            return out;
          },
          [&](const IndicatorPoint &f) -> Vector { return f.c; },
          [&](const IndicatorBox &f) -> Vector { return x.cwiseMax(f.lo).cwiseMin(f.hi); },
          [&](const L1Shifted &f) -> Vector {
            return f.p + soft_threshold(x - f.p, gamma * f.weight);
          },
          [&](const Zero &) -> Vector { return x; },
      },
      kind_);
}

Vector Proximable::conjugate_prox(VectorView x, double gamma) const {
  check_step(gamma);
  check_dim(x.size(), "Proximable::conjugate_prox");
  return std::visit(
      overloaded{
          // dom l1^* is the sup-norm ball of radius weight; the prox is the projection.
          [&](const L1 &f) -> Vector { return x.cwiseMax(-f.weight).cwiseMin(f.weight); },
          [&](const GroupL21 &f) -> Vector {
            Vector out = x;
            for (Index g = 0; g < x.size(); g += f.group_size) {
              const double nrm = x.segment(g, f.group_size).norm();
              if (nrm > f.weight) out.segment(g, f.group_size) *= f.weight / nrm;
            }
            return out;
          },
          // (iota_{c})^*(u) = <c, u>
          [&](const IndicatorPoint &f) -> Vector { return x - gamma * f.c; },
          // support function of the box: piecewise linear with a kink at 0
          [&](const IndicatorBox &f) -> Vector {
            Vector out(x.size());
            for (Index i = 0; i < x.size(); ++i) {
              if (x[i] > gamma * f.hi[i]) {
                out[i] = x[i] - gamma * f.hi[i];
              } else if (x[i] < gamma * f.lo[i]) {
                out[i] = x[i] - gamma * f.lo[i];
              } else {
                out[i] = 0.0;
              }
            }
            return out;
          },
          // (w||. - p||_1)^*(u) = <p, u> + iota_{||u||_inf <= w}
          [&](const L1Shifted &f) -> Vector {
            return (x - gamma * f.p).cwiseMax(-f.weight).cwiseMin(f.weight);
          },
          [&](const Zero &) -> Vector { return Vector::Zero(x.size()); },
      },
      kind_);
}

double Proximable::conjugate_value(VectorView u) const {
  check_dim(u.size(), "Proximable::conjugate_value");
  return std::visit(
      overloaded{
          [&](const L1 &f) { return within_sup_ball(u, f.weight) ? 0.0 : kInf; },
          [&](const GroupL21 &f) {
            const double bound = f.weight * (1.0 + kDomainTol);
            for (Index g = 0; g < u.size(); g += f.group_size) {
              if (u.segment(g, f.group_size).norm() > bound) return kInf;
            }
            return 0.0;
          },
          [&](const IndicatorPoint &f) { return f.c.dot(u); },
          [&](const IndicatorBox &f) {
            double s = 0.0;
            for (Index i = 0; i < u.size(); ++i) s += u[i] > 0.0 ? f.hi[i] * u[i] : f.lo[i] * u[i];
            return s;
          },
          [&](const L1Shifted &f) { return within_sup_ball(u, f.weight) ? f.p.dot(u) : kInf; },
          [&](const Zero &) { return (u.array() == 0.0).all() ? 0.0 : kInf; },
      },
      kind_);
}

Proximable Proximable::restrict(Index offset, Index len) const {
  if (offset < 0 || len < 1) throw ShapeError("restrict: invalid range");
  if (auto d = dim(); d && offset + len > *d) throw ShapeError("restrict: range exceeds dimension");
  return std::visit(
      overloaded{
          [&](const GroupL21 &f) -> Proximable {
            if (offset % f.group_size != 0 || len % f.group_size != 0) {
              throw CapabilityError("group_l21 does not split across a partial group");
            }
            return Proximable(f);
          },
          [&](const IndicatorPoint &f) -> Proximable {
            return Proximable(IndicatorPoint{f.c.segment(offset, len)});
          },
          [&](const IndicatorBox &f) -> Proximable {
            return Proximable(IndicatorBox{f.lo.segment(offset, len), f.hi.segment(offset, len)});
          },
          [&](const L1Shifted &f) -> Proximable {
            return Proximable(L1Shifted{f.p.segment(offset, len), f.weight});
          },
          [&](const auto &f) -> Proximable { return Proximable(f); },
      },
      kind_);
}

std::optional<double> Proximable::lipschitz_bound(Index dim) const {
  const double n = static_cast<double>(dim);
  return std::visit(overloaded{
                        [&](const L1 &f) -> std::optional<double> { return f.weight * std::sqrt(n); },
                        [&](const L1Shifted &f) -> std::optional<double> {
                          return f.weight * std::sqrt(n);
                        },
                        [&](const GroupL21 &f) -> std::optional<double> {
                          return f.weight * std::sqrt(n / static_cast<double>(f.group_size));
                        },
                        [&](const Zero &) -> std::optional<double> { return 0.0; },
                        [&](const auto &) -> std::optional<double> { return std::nullopt; },
                    },
                    kind_);
}

// ---------------------------------------------------------------------------

SmoothTerm SmoothTerm::least_squares(LinearMap A, Vector b, std::optional<double> lipschitz) {
  require_same_size(static_cast<std::size_t>(b.size()), static_cast<std::size_t>(A.out_dim()),
                    "least_squares: b");
  const double norm_sq = [&] {
    if (lipschitz) return *lipschitz;
    const double n = operator_norm(A);
    return n * n;
  }();
  if (!(norm_sq >= 0.0)) throw ParameterError("least_squares: Lipschitz constant must be >= 0");
  const Index dim = A.in_dim();
  return SmoothTerm(LeastSquares{std::move(A), std::move(b)}, dim, norm_sq);
}

SmoothTerm SmoothTerm::quadratic_form(Matrix K, double lambda, std::optional<double> lipschitz) {
  if (K.rows() != K.cols() || K.rows() < 1) throw ShapeError("quadratic_form: K must be square");
  if (!(lambda >= 0.0)) throw ParameterError("quadratic_form: lambda must be >= 0");
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + K.cwiseAbs().maxCoeff())) {
    throw ParameterError("quadratic_form: K must be symmetric");
  }
  const Index dim = K.rows();
  auto shared = std::make_shared<const Matrix>(std::move(K));
  double L = 0.0;
  if (lipschitz) {
    L = *lipschitz;
  } else if (lambda > 0.0) {
    // For symmetric PSD K the operator norm is the top eigenvalue.
    L = lambda * operator_norm(LinearMap::dense(*shared));
  }
  return SmoothTerm(QuadraticForm{std::move(shared), lambda}, dim, L);
}

SmoothTerm SmoothTerm::zero(Index dim) {
  if (dim < 1) throw ShapeError("zero smooth term needs a positive dimension");
  return SmoothTerm(Zero{dim}, dim, 0.0);
}

double SmoothTerm::value(VectorView x) const {
  require_same_size(static_cast<std::size_t>(x.size()), static_cast<std::size_t>(dim_),
                    "SmoothTerm::value");
  return std::visit(overloaded{
                        [&](const LeastSquares &f) { return 0.5 * (f.A.apply(x) - f.b).squaredNorm(); },
                        [&](const QuadraticForm &f) { return 0.5 * f.lambda * x.dot(*f.K * x); },
                        [&](const Zero &) { return 0.0; },
                    },
                    kind_);
}

Vector SmoothTerm::gradient(VectorView x) const { return value_grad(x).second; }

std::pair<double, Vector> SmoothTerm::value_grad(VectorView x) const {
  require_same_size(static_cast<std::size_t>(x.size()), static_cast<std::size_t>(dim_),
                    "SmoothTerm::value_grad");
  return std::visit(overloaded{
                        [&](const LeastSquares &f) -> std::pair<double, Vector> {
                          const Vector r = f.A.apply(x) - f.b;
                          return {0.5 * r.squaredNorm(), f.A.adjoint(r)};
                        },
                        [&](const QuadraticForm &f) -> std::pair<double, Vector> {
                          Vector kx = *f.K * x;
                          const double v = 0.5 * f.lambda * x.dot(kx);
                          return {v, f.lambda * kx};
                        },
                        [&](const Zero &) -> std::pair<double, Vector> {
                          return {0.0, Vector::Zero(x.size())};
                        },
                    },
                    kind_);
}

} // namespace asgard
