#pragma once

#include <array>

#include "bboxlab/geometry.hpp"
#include "bboxlab/losses.hpp"

namespace bboxlab {

/// Derivative with respect to the predicted box, ordered (x1, y1, x2, y2).
using Grad4 = std::array<double, 4>;

/// Two coordinates closer than this are treated as tied inside min/max.
inline constexpr double kTieTolerance = 1e-12;

struct LossEval {
  double value = 0.0;
  Grad4 grad{};
};

/// Loss value plus its closed-form gradient with respect to pair.pred; the
/// ground-truth box is held constant.
///
/// Subgradient rule at a tie inside min(u, v) / max(u, v), where u is a
/// predicted coordinate and v the matching ground-truth one: when
/// |u - v| <= kTieTolerance the derivative is split evenly between the two
/// operands, i.e. the mean of the one-sided derivatives. The consequence is
/// that every kind has an exactly zero gradient on an identical pair.
/// The clamp max(0, w_min) inside the intersection area passes gradient only
/// when w_min > 0, so fully separated or touching pairs give IoU a zero
/// gradient. A corner that coincides with its target contributes zero to the
/// corner-distance gradient.
LossEval eval_with_grad(LossKind kind, const BoxPair& pair, const ScaParams& params = {});

/// Central differences of loss_value() over the four predicted coordinates.
/// Throws std::invalid_argument unless step > 0.
Grad4 fd_grad(LossKind kind, const BoxPair& pair, const ScaParams& params = {},
              double step = 1e-6);

/// Euclidean norm of eval_with_grad(...).grad.
double grad_magnitude(LossKind kind, const BoxPair& pair, const ScaParams& params = {});

double norm(const Grad4& g) noexcept;

/// max_i |a_i - b_i| / max(max_i |a_i|, max_i |b_i|); 0 when both are zero.
double max_relative_error(const Grad4& analytic, const Grad4& reference) noexcept;

}  // namespace bboxlab
