#include "asgard/smoothing.hpp"

#include <string>

#include "asgard/errors.hpp"

namespace asgard {

std::vector<ScaledBlock> scaled_blocks(const Proximable &h, const Scaling &S, Index dim) {
  std::vector<ScaledBlock> blocks;
  if (S.is_identity()) {
    blocks.push_back({0, dim, h, 1.0});
    return blocks;
  }
  const auto *bs = std::get_if<Scaling::BlockScalar>(&S.kind());
  if (bs == nullptr) {
    throw CapabilityError("smoothing supports S = identity or block_scalar only");
  }
  if (S.dim() != dim) {
    require_same_size(static_cast<std::size_t>(dim), static_cast<std::size_t>(S.dim()),
                      "block_scalar scaling");
  }
  Index off = 0;
  for (std::size_t i = 0; i < bs->sizes.size(); ++i) {
    blocks.push_back({off, bs->sizes[i], h.restrict(off, bs->sizes[i]), bs->scalars[i]});
    off += bs->sizes[i];
  }
  return blocks;
}

BlockEval smoothed_block(const Proximable &h, double beta, double s, VectorView y,
                         VectorView center) {
  require_same_size(static_cast<std::size_t>(center.size()), static_cast<std::size_t>(y.size()),
                    "smoothing center");
  const double bs = beta * s;
  Vector u = h.conjugate_prox(y / bs + center, 1.0 / bs);
  const double value = y.dot(u) - h.conjugate_value(u) - 0.5 * bs * (u - center).squaredNorm();
  return {value, std::move(u)};
}

SmoothedConjugate::SmoothedConjugate(const Proximable &h, double beta, const Vector &center,
                                     const Scaling &S)
    : h_(&h), beta_(beta), center_(&center), S_(&S) {
  if (!(beta > kMinBeta) || !std::isfinite(beta)) {
    throw ParameterError("smoothing parameter beta must exceed 1e-300, got " + std::to_string(beta));
  }
}

std::pair<double, Vector> SmoothedConjugate::value_and_y_star(VectorView y) const {
  require_same_size(static_cast<std::size_t>(y.size()), static_cast<std::size_t>(center_->size()),
                    "SmoothedConjugate argument");
  const auto blocks = scaled_blocks(*h_, *S_, y.size());
  if (blocks.size() == 1) {
    BlockEval e = smoothed_block(blocks[0].h, beta_, blocks[0].s, y, *center_);
    return {e.value, std::move(e.y_star)};
  }
  double total = 0.0;
  Vector u(y.size());
  for (const auto &b : blocks) {
    BlockEval e = smoothed_block(b.h, beta_, b.s, y.segment(b.offset, b.len),
                                 center_->segment(b.offset, b.len));
    total += e.value;
    u.segment(b.offset, b.len) = e.y_star;
  }
  return {total, std::move(u)};
}

Vector SmoothedConjugate::y_star(VectorView y) const { return value_and_y_star(y).second; }

double SmoothedConjugate::value(VectorView y) const { return value_and_y_star(y).first; }

std::pair<double, Vector> composite_value_grad(const SmoothedConjugate &sc, const LinearMap &M,
                                               VectorView x) {
  auto [value, u] = sc.value_and_y_star(M.apply(x));
  return {value, M.adjoint(u)};
}

} // namespace asgard
