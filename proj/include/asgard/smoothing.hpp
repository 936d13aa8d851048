#pragma once

#include <utility>
#include <vector>

#include "asgard/funcs.hpp"
#include "asgard/linops.hpp"

namespace asgard {

/// One slice of the dual space on which S acts as s * I.
struct ScaledBlock {
  Index offset;
  Index len;
  Proximable h;
  double s;
};

/// Splits (h, S) over R^dim into blocks with scalar scaling.
/// Throws CapabilityError for a diagonal S or when h does not split along the
/// block boundaries.
std::vector<ScaledBlock> scaled_blocks(const Proximable &h, const Scaling &S, Index dim);

struct BlockEval {
  double value;
  Vector y_star;
};

/// Maximizer and value of <y, u> - h^*(u) - (beta s / 2) ||u - center||^2.
BlockEval smoothed_block(const Proximable &h, double beta, double s, VectorView y,
                         VectorView center);

inline constexpr double kMinBeta = 1e-300;

/// h_beta(y; center) = max_u <y, u> - h^*(u) - (beta / 2) ||u - center||_S^2.
///
/// Holds references to h, center and S; they must outlive the object.
class SmoothedConjugate {
public:
  SmoothedConjugate(const Proximable &h, double beta, const Vector &center, const Scaling &S);
  SmoothedConjugate(const Proximable &, double, Vector &&, const Scaling &) = delete;

  double beta() const noexcept { return beta_; }
  const Proximable &h() const noexcept { return *h_; }
  const Vector &center() const noexcept { return *center_; }
  const Scaling &scaling() const noexcept { return *S_; }

  /// The maximizer, which is also the gradient of y -> h_beta(y; center).
  Vector y_star(VectorView y) const;
  double value(VectorView y) const;
  std::pair<double, Vector> value_and_y_star(VectorView y) const;

private:
  const Proximable *h_;
  double beta_;
  const Vector *center_;
  const Scaling *S_;
};

/// (h_beta(Mx; center), M^* y_star(Mx)): value and gradient of x -> h_beta(Mx).
std::pair<double, Vector> composite_value_grad(const SmoothedConjugate &sc, const LinearMap &M,
                                               VectorView x);

} // namespace asgard
