#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bboxlab/geometry.hpp"

namespace bboxlab {

enum class LossKind {
  IoU,
  GIoU,
  DIoU,
  CIoU,
  SO,
  CD,
  SCA,
  CenterDist,
  SmoothL1,
};

inline constexpr std::array<LossKind, 9> kAllLossKinds = {
    LossKind::IoU, LossKind::GIoU,       LossKind::DIoU,    LossKind::CIoU, LossKind::SO,
    LossKind::CD,  LossKind::SCA, LossKind::CenterDist, LossKind::SmoothL1,
};

/// Canonical lower-case name used on the command line and in CSV files.
std::string_view to_string(LossKind kind) noexcept;

/// Case-insensitive inverse of to_string(). Throws std::invalid_argument.
LossKind parse_loss_kind(std::string_view name);

/// Comma-separated list of kind names, e.g. "iou,so,sca".
std::vector<LossKind> parse_loss_kinds(std::string_view list);

struct ScaParams {
  /// Weight on the corner-distance term.
  double alpha = 0.5;
};

/// Transition point of the smooth-l1 baseline.
inline constexpr double kSmoothL1Beta = 1.0;

// Similarity measures. All throw DegenerateBoxError on a pair that collapses
// on an axis.
double iou(const BoxPair& pair);
double giou(const BoxPair& pair);
double diou(const BoxPair& pair);
double ciou(const BoxPair& pair);
double side_overlap(const BoxPair& pair);

/// Squared center distance over the squared enclosing diagonal; the penalty
/// DIoU subtracts from IoU.
double center_dist_penalty(const BoxPair& pair);

/// Aspect-ratio consistency term of CIoU: (4/pi^2)(atan(wg/hg) - atan(w/h))^2.
double ciou_aspect_term(const BoxPair& pair);

double loss_so(const BoxPair& pair);

/// Sum of the two corner-to-corner distances normalized by the enclosing
/// diagonal.
double loss_cd(const BoxPair& pair);

double loss_sca(const BoxPair& pair, const ScaParams& params = {});

double loss_smooth_l1(const BoxPair& pair) noexcept;

/// Dispatch. IoU-family kinds are 1 - metric; every kind is zero on an
/// identical pair.
double loss_value(LossKind kind, const BoxPair& pair, const ScaParams& params = {});

}  // namespace bboxlab
