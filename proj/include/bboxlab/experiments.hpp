#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "bboxlab/geometry.hpp"
#include "bboxlab/gradients.hpp"
#include "bboxlab/losses.hpp"

namespace bboxlab {

// ---------------------------------------------------------------------------
// Random pairs

enum class SampleDomain {
  /// Centers uniform in [0,1]^2, width and height log-uniform in [0.1, 0.6].
  Unit,
  /// Unit-domain pairs with zero intersection (rejection sampled).
  Disjoint,
  /// Unit-domain pairs with positive intersection (rejection sampled).
  Overlapping,
  /// Unit-domain pairs at least kOffTieMargin away from every kink of every
  /// loss: coordinate ties, the intersection boundary, coincident corners
  /// and the smooth-l1 transition.
  OffTie,
};

inline constexpr double kOffTieMargin = 1e-4;

std::string_view to_string(SampleDomain domain) noexcept;
SampleDomain parse_sample_domain(std::string_view name);

/// Deterministic pair stream. Pairs are generated in fixed blocks of
/// kBlockSize, each block from its own generator seeded by (seed, block), so
/// any block can be produced independently and in parallel.
struct PairSampler {
  static constexpr std::size_t kBlockSize = 4096;

  std::uint64_t seed = 42;
  std::size_t count = 100000;
  SampleDomain domain = SampleDomain::Unit;

  [[nodiscard]] std::size_t block_count() const noexcept {
    return (count + kBlockSize - 1) / kBlockSize;
  }
  [[nodiscard]] std::vector<BoxPair> block(std::size_t index) const;
};

std::vector<BoxPair> sample_pairs(const PairSampler& sampler);

/// Runs task(i) for i in [0, n) on up to `threads` workers. Callers write
/// into per-task slots and reduce in index order afterwards, so results do
/// not depend on the worker count.
template <class Task>
void parallel_for(std::size_t n, unsigned threads, Task&& task);

// ---------------------------------------------------------------------------
// Gradient magnitude versus IoU

inline constexpr std::size_t kIouBins = 10;

struct BinCell {
  std::size_t count = 0;
  double mean_grad_norm = 0.0;
};

struct BinnedStats {
  std::vector<double> edges;  // kIouBins + 1 values, 0.0 ... 1.0
  std::vector<LossKind> kinds;
  std::vector<std::vector<BinCell>> cells;  // [kind][bin]
  std::size_t sampled = 0;
  std::size_t skipped_degenerate = 0;

  [[nodiscard]] const std::vector<BinCell>& of(LossKind kind) const;
};

/// Bin index of an IoU value; [0, 0.1) ... [0.9, 1.0].
std::size_t iou_bin(double iou_value) noexcept;

BinnedStats grad_magnitude_study(const PairSampler& sampler, const std::vector<LossKind>& kinds,
                                 const ScaParams& params = {}, unsigned threads = 1);

// ---------------------------------------------------------------------------
// SO against IoU / GIoU

struct CorrelationRow {
  double iou = 0.0;
  double giou = 0.0;
  double so = 0.0;
  bool overlapping = false;
};

struct CorrelationTable {
  std::vector<CorrelationRow> rows;
  /// Spearman rank correlation of so against iou over the overlapping rows.
  double spearman_so_iou = 0.0;
  std::size_t overlapping = 0;
};

CorrelationRow correlation_row(const BoxPair& pair);
CorrelationTable correlation_rows(const std::vector<BoxPair>& pairs);
CorrelationTable correlation_study(const PairSampler& sampler, unsigned threads = 1);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

// ---------------------------------------------------------------------------
// Analytic versus finite-difference gradients

struct GradCheckRow {
  LossKind kind = LossKind::IoU;
  std::size_t pairs = 0;
  double max_rel_error = 0.0;
};

/// Compares eval_with_grad() with fd_grad(step) on sampler's pairs (normally
/// the OffTie domain) for every kind.
std::vector<GradCheckRow> gradient_check(const PairSampler& sampler,
                                         const std::vector<LossKind>& kinds,
                                         const ScaParams& params = {}, double step = 1e-6,
                                         unsigned threads = 1);

// ---------------------------------------------------------------------------
// Anchor-grid regression simulation

struct SimConfig {
  int grid = 20;
  /// Distance between neighbouring grid points. The grid is centered on
  /// gt_center.
  double grid_spacing = 0.25;
  std::vector<double> anchor_ratios{2.0, 1.0, 0.5};  // width : height
  std::vector<double> anchor_scales{2.0, 4.0, 6.0};  // sqrt(area)
  std::vector<double> gt_ratios{4.0, 2.0, 1.0, 0.5, 0.25};
  Point gt_center{10.0, 10.0};
  double gt_area = 16.0;
  double eta = 0.1;
  int iters = 200;
  std::vector<LossKind> kinds{LossKind::IoU, LossKind::GIoU, LossKind::DIoU, LossKind::SCA};
  double alpha = 0.5;
  std::uint64_t seed = 42;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// Box of area scale^2 and width:height = ratio centered on `center`.
Box box_at(Point center, double ratio, double scale);

std::vector<Box> anchor_grid(const SimConfig& config);
std::vector<Box> gt_boxes(const SimConfig& config);

/// A loss times a constant weight; the simulation descends on weight * loss.
struct Objective {
  LossKind kind = LossKind::SCA;
  double weight = 1.0;
};

struct Trajectory {
  std::vector<double> mean_iou;          // iters + 1 entries, t = 0 is the start
  std::vector<double> mean_corner_dist;  // normalized corner distance, same length
  std::vector<double> final_iou;         // per instance, anchor-major
  std::size_t degenerate_instances = 0;

  /// First iteration with mean_iou >= threshold.
  [[nodiscard]] std::optional<int> first_iou_at_least(double threshold) const;
  /// First iteration with mean_corner_dist < threshold.
  [[nodiscard]] std::optional<int> first_corner_dist_below(double threshold) const;
};

/// Regresses every anchor toward every gt box with
///   B_t = B_{t-1} - eta * d(weight * loss)/dB_{t-1},
/// repairing inverted corners after each step.
Trajectory simulate(const std::vector<Box>& anchors, const std::vector<Box>& gts,
                    const Objective& objective, double eta, int iters, const ScaParams& params,
                    unsigned threads = 1);

using SimulationResult = std::vector<std::pair<LossKind, Trajectory>>;

SimulationResult run_simulation(const SimConfig& config, unsigned threads = 1);

struct AlignmentResult {
  Trajectory center;  // CenterDist, weight 1
  Trajectory corner;  // CD, weight 0.5
};

inline constexpr Objective kCenterAlignment{LossKind::CenterDist, 1.0};
inline constexpr Objective kCornerAlignment{LossKind::CD, 0.5};

AlignmentResult alignment_race(const SimConfig& config, unsigned threads = 1);

}  // namespace bboxlab

#include "bboxlab/parallel.ipp"
