#include "bboxlab/losses.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bboxlab {

namespace {

constexpr std::array<std::string_view, 9> kNames = {
    "iou", "giou", "diou", "ciou", "so", "cd", "sca", "center", "smoothl1",
};

double clamped(double divisor) noexcept { return std::max(divisor, kEpsilon); }

double iou_from(const BoxPair& pair, const SideTerms& t) noexcept {
  const double inter = std::max(0.0, t.w_min) * std::max(0.0, t.h_min);
  const double uni = pair.pred.area() + pair.gt.area() - inter;
  return inter / clamped(uni);
}

double center_penalty_from(const BoxPair& pair, const SideTerms& t) noexcept {
  const Point cp = pair.pred.center();
  const Point cg = pair.gt.center();
  const double dx = cp.x - cg.x;
  const double dy = cp.y - cg.y;
  return (dx * dx + dy * dy) / clamped(t.w_max * t.w_max + t.h_max * t.h_max);
}

double smooth_l1_term(double d) noexcept {
  const double a = std::abs(d);
  return a < kSmoothL1Beta ? 0.5 * d * d / kSmoothL1Beta : a - 0.5 * kSmoothL1Beta;
}

}  // namespace

std::string_view to_string(LossKind kind) noexcept {
  return kNames[static_cast<std::size_t>(kind)];
}

LossKind parse_loss_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (lower == kNames[i]) return static_cast<LossKind>(i);
  }
  throw std::invalid_argument("unknown loss kind '" + std::string(name) + "'");
}

std::vector<LossKind> parse_loss_kinds(std::string_view list) {
  std::vector<LossKind> kinds;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    kinds.push_back(parse_loss_kind(list.substr(start, comma - start)));
    start = comma + 1;
  }
  return kinds;
}

double iou(const BoxPair& pair) { return iou_from(pair, side_terms(pair)); }

double giou(const BoxPair& pair) {
  const SideTerms t = side_terms(pair);
  const double inter = std::max(0.0, t.w_min) * std::max(0.0, t.h_min);
  const double uni = pair.pred.area() + pair.gt.area() - inter;
  const double hull = t.w_max * t.h_max;
  return inter / clamped(uni) - (hull - uni) / clamped(hull);
}

double center_dist_penalty(const BoxPair& pair) {
  return center_penalty_from(pair, side_terms(pair));
}

double diou(const BoxPair& pair) {
  const SideTerms t = side_terms(pair);
  return iou_from(pair, t) - center_penalty_from(pair, t);
}

double ciou_aspect_term(const BoxPair& pair) {
  constexpr double k = 4.0 / (std::numbers::pi * std::numbers::pi);
  const double gap = std::atan(pair.gt.width() / clamped(pair.gt.height())) -
                     std::atan(pair.pred.width() / clamped(pair.pred.height()));
  return k * gap * gap;
}

double ciou(const BoxPair& pair) {
  const SideTerms t = side_terms(pair);
  const double overlap = iou_from(pair, t);
  const double v = ciou_aspect_term(pair);
  const double weight = v / clamped((1.0 - overlap) + v);
  return overlap - center_penalty_from(pair, t) - weight * v;
}

double side_overlap(const BoxPair& pair) {
  const SideTerms t = side_terms(pair);
  return t.w_min / clamped(t.w_max) + t.h_min / clamped(t.h_max);
}

double loss_so(const BoxPair& pair) { return 2.0 - side_overlap(pair); }

double loss_cd(const BoxPair& pair) {
  const double diag = std::sqrt(enclosing_diagonal_sq(pair));
  if (!(diag >= kEpsilon)) {
    throw DegenerateBoxError("degenerate box pair: enclosing diagonal vanishes (" +
                             format_box(pair.pred) + " / " + format_box(pair.gt) + ")");
  }
  const double d1 = distance(pair.pred.top_left(), pair.gt.top_left());
  const double d2 = distance(pair.pred.bottom_right(), pair.gt.bottom_right());
  return (d1 + d2) / diag;
}

double loss_sca(const BoxPair& pair, const ScaParams& params) {
  return loss_so(pair) + params.alpha * loss_cd(pair);
}

double loss_smooth_l1(const BoxPair& pair) noexcept {
  const Box& p = pair.pred;
  const Box& g = pair.gt;
  return smooth_l1_term(p.x1 - g.x1) + smooth_l1_term(p.y1 - g.y1) +
         smooth_l1_term(p.x2 - g.x2) + smooth_l1_term(p.y2 - g.y2);
}

double loss_value(LossKind kind, const BoxPair& pair, const ScaParams& params) {
  switch (kind) {
    case LossKind::IoU: return 1.0 - iou(pair);
    case LossKind::GIoU: return 1.0 - giou(pair);
    case LossKind::DIoU: return 1.0 - diou(pair);
    case LossKind::CIoU: return 1.0 - ciou(pair);
    case LossKind::SO: return loss_so(pair);
    case LossKind::CD: return loss_cd(pair);
    case LossKind::SCA: return loss_sca(pair, params);
    case LossKind::CenterDist: return center_dist_penalty(pair);
    case LossKind::SmoothL1: return loss_smooth_l1(pair);
  }
  throw std::invalid_argument("unhandled loss kind");
}

}  // namespace bboxlab
