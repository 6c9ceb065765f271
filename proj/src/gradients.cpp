#include "bboxlab/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bboxlab {

namespace {

constexpr std::size_t X1 = 0, Y1 = 1, X2 = 2, Y2 = 3;

Grad4 operator+(const Grad4& a, const Grad4& b) noexcept {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
Grad4 operator-(const Grad4& a, const Grad4& b) noexcept {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}
Grad4 operator*(double s, const Grad4& a) noexcept {
  return {s * a[0], s * a[1], s * a[2], s * a[3]};
}

// Share of d min(u, v) routed to u (the predicted coordinate).
double min_weight(double u, double v) noexcept {
  if (std::abs(u - v) <= kTieTolerance) return 0.5;
  return u < v ? 1.0 : 0.0;
}

double max_weight(double u, double v) noexcept {
  if (std::abs(u - v) <= kTieTolerance) return 0.5;
  return u > v ? 1.0 : 0.0;
}

struct Scalar {
  double v = 0.0;
  Grad4 d{};
};

struct SideGrads {
  Scalar w_min, w_max, h_min, h_max;
};

SideGrads side_grads(const BoxPair& pair) {
  const SideTerms t = side_terms(pair);
  const Box& p = pair.pred;
  const Box& g = pair.gt;
  SideGrads s;
  s.w_min.v = t.w_min;
  s.w_min.d[X2] = min_weight(p.x2, g.x2);
  s.w_min.d[X1] = -max_weight(p.x1, g.x1);
  s.w_max.v = t.w_max;
  s.w_max.d[X2] = max_weight(p.x2, g.x2);
  s.w_max.d[X1] = -min_weight(p.x1, g.x1);
  s.h_min.v = t.h_min;
  s.h_min.d[Y2] = min_weight(p.y2, g.y2);
  s.h_min.d[Y1] = -max_weight(p.y1, g.y1);
  s.h_max.v = t.h_max;
  s.h_max.d[Y2] = max_weight(p.y2, g.y2);
  s.h_max.d[Y1] = -min_weight(p.y1, g.y1);
  return s;
}

Scalar clamp_divisor(Scalar s) noexcept {
  if (s.v < kEpsilon) return {kEpsilon, {}};
  return s;
}

struct Overlap {
  Scalar inter, uni, iou;
};

Overlap overlap_grads(const BoxPair& pair, const SideGrads& s) {
  const Box& p = pair.pred;
  const Scalar iw = s.w_min.v > 0.0 ? s.w_min : Scalar{};
  const Scalar ih = s.h_min.v > 0.0 ? s.h_min : Scalar{};

  Overlap o;
  o.inter.v = iw.v * ih.v;
  o.inter.d = ih.v * iw.d + iw.v * ih.d;

  const double w = p.width();
  const double h = p.height();
  const Grad4 d_area{-h, -w, h, w};
  o.uni.v = p.area() + pair.gt.area() - o.inter.v;
  o.uni.d = d_area - o.inter.d;
  o.uni = clamp_divisor(o.uni);

  o.iou.v = o.inter.v / o.uni.v;
  o.iou.d = (1.0 / o.uni.v) * (o.inter.d - o.iou.v * o.uni.d);
  return o;
}

// rho^2 / c^2 with c the enclosing diagonal.
Scalar center_penalty_grads(const BoxPair& pair, const SideGrads& s) {
  const Point cp = pair.pred.center();
  const Point cg = pair.gt.center();
  const double dx = cp.x - cg.x;
  const double dy = cp.y - cg.y;
  const Scalar rho2{dx * dx + dy * dy, {dx, dy, dx, dy}};

  Scalar c2;
  c2.v = s.w_max.v * s.w_max.v + s.h_max.v * s.h_max.v;
  c2.d = (2.0 * s.w_max.v) * s.w_max.d + (2.0 * s.h_max.v) * s.h_max.d;
  c2 = clamp_divisor(c2);

  Scalar pen;
  pen.v = rho2.v / c2.v;
  pen.d = (1.0 / c2.v) * (rho2.d - pen.v * c2.d);
  return pen;
}

Grad4 grad_giou(const BoxPair& pair, const SideGrads& s) {
  const Overlap o = overlap_grads(pair, s);
  Scalar hull;
  hull.v = s.w_max.v * s.h_max.v;
  hull.d = s.h_max.v * s.w_max.d + s.w_max.v * s.h_max.d;
  hull = clamp_divisor(hull);
  // giou = iou - 1 + union / hull
  const double ratio = o.uni.v / hull.v;
  return o.iou.d + (1.0 / hull.v) * (o.uni.d - ratio * hull.d);
}

Grad4 grad_ciou(const BoxPair& pair, const SideGrads& s) {
  constexpr double k = 4.0 / (std::numbers::pi * std::numbers::pi);
  const Overlap o = overlap_grads(pair, s);
  const Scalar pen = center_penalty_grads(pair, s);

  const Box& p = pair.pred;
  const Box& g = pair.gt;
  const double w = p.width();
  Grad4 dw{-1.0, 0.0, 1.0, 0.0};
  double h = p.height();
  Grad4 dh{0.0, -1.0, 0.0, 1.0};
  if (h < kEpsilon) {
    h = kEpsilon;
    dh = {};
  }
  const double gap = std::atan(g.width() / std::max(g.height(), kEpsilon)) - std::atan(w / h);
  const double r2 = std::max(w * w + h * h, kEpsilon);
  const Grad4 d_atan = (1.0 / r2) * (h * dw - w * dh);

  Scalar v;
  v.v = k * gap * gap;
  v.d = (-2.0 * k * gap) * d_atan;

  Scalar denom;
  denom.v = (1.0 - o.iou.v) + v.v;
  denom.d = v.d - o.iou.d;
  denom = clamp_divisor(denom);

  // aspect penalty = v^2 / denom
  Scalar aspect;
  aspect.v = v.v * v.v / denom.v;
  aspect.d = (1.0 / denom.v) * ((2.0 * v.v) * v.d - aspect.v * denom.d);

  return o.iou.d - pen.d - aspect.d;
}

Grad4 grad_side_overlap(const SideGrads& s) {
  const Scalar wmax = clamp_divisor(s.w_max);
  const Scalar hmax = clamp_divisor(s.h_max);
  const Grad4 dw = (1.0 / wmax.v) * (s.w_min.d - (s.w_min.v / wmax.v) * wmax.d);
  const Grad4 dh = (1.0 / hmax.v) * (s.h_min.d - (s.h_min.v / hmax.v) * hmax.d);
  return dw + dh;
}

Grad4 grad_corner_distance(const BoxPair& pair) {
  const Box& p = pair.pred;
  const Box& g = pair.gt;

  // Enclosing box sides are the same max/min selections as w_max/h_max.
  const SideGrads s = side_grads(pair);
  Scalar diag;
  diag.v = std::sqrt(s.w_max.v * s.w_max.v + s.h_max.v * s.h_max.v);
  if (!(diag.v >= kEpsilon)) {
    throw DegenerateBoxError("degenerate box pair: enclosing diagonal vanishes");
  }
  diag.d = (1.0 / diag.v) * (s.w_max.v * s.w_max.d + s.h_max.v * s.h_max.d);

  Scalar corners;
  const double d1 = distance(p.top_left(), g.top_left());
  const double d2 = distance(p.bottom_right(), g.bottom_right());
  corners.v = d1 + d2;
  if (d1 > 0.0) {
    corners.d[X1] = (p.x1 - g.x1) / d1;
    corners.d[Y1] = (p.y1 - g.y1) / d1;
  }
  if (d2 > 0.0) {
    corners.d[X2] = (p.x2 - g.x2) / d2;
    corners.d[Y2] = (p.y2 - g.y2) / d2;
  }
  const double value = corners.v / diag.v;
  return (1.0 / diag.v) * (corners.d - value * diag.d);
}

double smooth_l1_slope(double d) noexcept {
  if (std::abs(d) < kSmoothL1Beta) return d / kSmoothL1Beta;
  return d > 0.0 ? 1.0 : -1.0;
}

Grad4 grad_smooth_l1(const BoxPair& pair) noexcept {
  const Box& p = pair.pred;
  const Box& g = pair.gt;
  return {smooth_l1_slope(p.x1 - g.x1), smooth_l1_slope(p.y1 - g.y1),
          smooth_l1_slope(p.x2 - g.x2), smooth_l1_slope(p.y2 - g.y2)};
}

Grad4 loss_grad(LossKind kind, const BoxPair& pair, const ScaParams& params) {
  switch (kind) {
    case LossKind::IoU: {
      const SideGrads s = side_grads(pair);
      return -1.0 * overlap_grads(pair, s).iou.d;
    }
    case LossKind::GIoU: return -1.0 * grad_giou(pair, side_grads(pair));
    case LossKind::DIoU: {
      const SideGrads s = side_grads(pair);
      return center_penalty_grads(pair, s).d - overlap_grads(pair, s).iou.d;
    }
    case LossKind::CIoU: return -1.0 * grad_ciou(pair, side_grads(pair));
    case LossKind::SO: return -1.0 * grad_side_overlap(side_grads(pair));
    case LossKind::CD: return grad_corner_distance(pair);
    case LossKind::SCA:
      return params.alpha * grad_corner_distance(pair) - grad_side_overlap(side_grads(pair));
    case LossKind::CenterDist: return center_penalty_grads(pair, side_grads(pair)).d;
    case LossKind::SmoothL1: return grad_smooth_l1(pair);
  }
  throw std::invalid_argument("unhandled loss kind");
}

}  // namespace

LossEval eval_with_grad(LossKind kind, const BoxPair& pair, const ScaParams& params) {
  LossEval out;
  out.value = loss_value(kind, pair, params);
  out.grad = loss_grad(kind, pair, params);
  return out;
}

Grad4 fd_grad(LossKind kind, const BoxPair& pair, const ScaParams& params, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  Grad4 g{};
  for (std::size_t i = 0; i < 4; ++i) {
    BoxPair plus = pair;
    BoxPair minus = pair;
    double* coords_plus[] = {&plus.pred.x1, &plus.pred.y1, &plus.pred.x2, &plus.pred.y2};
    double* coords_minus[] = {&minus.pred.x1, &minus.pred.y1, &minus.pred.x2, &minus.pred.y2};
    *coords_plus[i] += step;
    *coords_minus[i] -= step;
    g[i] = (loss_value(kind, plus, params) - loss_value(kind, minus, params)) / (2.0 * step);
  }
  return g;
}

double norm(const Grad4& g) noexcept {
  return std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]);
}

double grad_magnitude(LossKind kind, const BoxPair& pair, const ScaParams& params) {
  return norm(eval_with_grad(kind, pair, params).grad);
}

double max_relative_error(const Grad4& analytic, const Grad4& reference) noexcept {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    diff = std::max(diff, std::abs(analytic[i] - reference[i]));
    scale = std::max({scale, std::abs(analytic[i]), std::abs(reference[i])});
  }
  if (scale == 0.0) return 0.0;
  return diff / scale;
}

}  // namespace bboxlab
