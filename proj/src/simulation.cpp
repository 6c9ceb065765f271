#include <cmath>
#include <stdexcept>
#include <string>

#include "bboxlab/experiments.hpp"

namespace bboxlab {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument("invalid simulation config: " + message);
}

bool all_positive(const std::vector<double>& values) {
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

void SimConfig::validate() const {
  require(grid >= 1, "grid must be at least 1");
  require(std::isfinite(grid_spacing) && grid_spacing >= 0.0, "grid_spacing must be >= 0");
  require(!anchor_ratios.empty() && all_positive(anchor_ratios),
          "anchor_ratios must be a non-empty list of positive values");
  require(!anchor_scales.empty() && all_positive(anchor_scales),
          "anchor_scales must be a non-empty list of positive values");
  require(!gt_ratios.empty() && all_positive(gt_ratios),
          "gt_ratios must be a non-empty list of positive values");
  require(std::isfinite(gt_center.x) && std::isfinite(gt_center.y), "gt_center must be finite");
  require(std::isfinite(gt_area) && gt_area > 0.0, "gt_area must be positive");
  require(std::isfinite(eta) && eta >= 0.0, "eta must be >= 0");
  require(iters >= 1, "iters must be at least 1");
  require(!kinds.empty(), "kinds must not be empty");
  require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be >= 0");
}

Box box_at(Point center, double ratio, double scale) {
  const double root = std::sqrt(ratio);
  const double w = scale * root;
  const double h = scale / root;
  return {center.x - 0.5 * w, center.y - 0.5 * h, center.x + 0.5 * w, center.y + 0.5 * h};
}

std::vector<Box> anchor_grid(const SimConfig& config) {
  config.validate();
  const double offset = 0.5 * static_cast<double>(config.grid - 1);
  std::vector<Box> anchors;
  anchors.reserve(static_cast<std::size_t>(config.grid * config.grid) *
                  config.anchor_ratios.size() * config.anchor_scales.size());
  for (int row = 0; row < config.grid; ++row) {
    for (int col = 0; col < config.grid; ++col) {
      const Point at{config.gt_center.x + (col - offset) * config.grid_spacing,
                     config.gt_center.y + (row - offset) * config.grid_spacing};
      for (double ratio : config.anchor_ratios) {
        for (double scale : config.anchor_scales) anchors.push_back(box_at(at, ratio, scale));
      }
    }
  }
  return anchors;
}

std::vector<Box> gt_boxes(const SimConfig& config) {
  config.validate();
  std::vector<Box> gts;
  for (double ratio : config.gt_ratios) {
    gts.push_back(box_at(config.gt_center, ratio, std::sqrt(config.gt_area)));
  }
  return gts;
}

std::optional<int> Trajectory::first_iou_at_least(double threshold) const {
  for (std::size_t t = 0; t < mean_iou.size(); ++t) {
    if (mean_iou[t] >= threshold) return static_cast<int>(t);
  }
  return std::nullopt;
}

std::optional<int> Trajectory::first_corner_dist_below(double threshold) const {
  for (std::size_t t = 0; t < mean_corner_dist.size(); ++t) {
    if (mean_corner_dist[t] < threshold) return static_cast<int>(t);
  }
  return std::nullopt;
}

Trajectory simulate(const std::vector<Box>& anchors, const std::vector<Box>& gts,
                    const Objective& objective, double eta, int iters, const ScaParams& params,
                    unsigned threads) {
  if (anchors.empty() || gts.empty()) {
    throw std::invalid_argument("simulation needs at least one anchor and one gt box");
  }
  if (iters < 1) throw std::invalid_argument("simulation needs iters >= 1");
  for (const Box& g : gts) {
    if (!g.is_ordered() || !(g.width() > kEpsilon) || !(g.height() > kEpsilon)) {
      throw std::invalid_argument("gt box " + format_box(g) + " has no area");
    }
  }

  constexpr std::size_t kChunk = 64;
  const std::size_t instances = anchors.size() * gts.size();
  const std::size_t steps = static_cast<std::size_t>(iters) + 1;
  const std::size_t chunks = (instances + kChunk - 1) / kChunk;

  struct Partial {
    std::vector<double> iou_sum, cd_sum;
    std::size_t degenerate = 0;
  };
  std::vector<Partial> partials(chunks);
  Trajectory out;
  out.final_iou.assign(instances, 0.0);

  parallel_for(chunks, threads, [&](std::size_t c) {
    Partial& part = partials[c];
    part.iou_sum.assign(steps, 0.0);
    part.cd_sum.assign(steps, 0.0);
    const std::size_t end = std::min(instances, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      BoxPair pair{anchors[i / gts.size()], gts[i % gts.size()]};
      repair_corners(pair.pred);
      bool degenerate = false;
      for (std::size_t t = 0; t < steps; ++t) {
        const double overlap = iou(pair);
        part.iou_sum[t] += overlap;
        part.cd_sum[t] += loss_cd(pair);
        if (t + 1 == steps) {
          out.final_iou[i] = overlap;
          break;
        }
        const Grad4 g = eval_with_grad(objective.kind, pair, params).grad;
        const double scale = eta * objective.weight;
        Box next{pair.pred.x1 - scale * g[0], pair.pred.y1 - scale * g[1],
                 pair.pred.x2 - scale * g[2], pair.pred.y2 - scale * g[3]};
        if (std::isfinite(next.x1) && std::isfinite(next.y1) && std::isfinite(next.x2) &&
            std::isfinite(next.y2)) {
          repair_corners(next);
          pair.pred = next;
        } else {
          degenerate = true;
        }
        if (!(pair.pred.width() > kEpsilon) || !(pair.pred.height() > kEpsilon)) {
          degenerate = true;
        }
      }
      if (degenerate) ++part.degenerate;
    }
  });

  out.mean_iou.assign(steps, 0.0);
  out.mean_corner_dist.assign(steps, 0.0);
  for (const Partial& part : partials) {
    out.degenerate_instances += part.degenerate;
    for (std::size_t t = 0; t < steps; ++t) {
      out.mean_iou[t] += part.iou_sum[t];
      out.mean_corner_dist[t] += part.cd_sum[t];
    }
  }
  const double n = static_cast<double>(instances);
  for (std::size_t t = 0; t < steps; ++t) {
    out.mean_iou[t] /= n;
    out.mean_corner_dist[t] /= n;
  }
  return out;
}

SimulationResult run_simulation(const SimConfig& config, unsigned threads) {
  const std::vector<Box> anchors = anchor_grid(config);
  const std::vector<Box> gts = gt_boxes(config);
  const ScaParams params{config.alpha};
  SimulationResult result;
  for (LossKind kind : config.kinds) {
    result.emplace_back(kind, simulate(anchors, gts, Objective{kind, 1.0}, config.eta,
                                       config.iters, params, threads));
  }
  return result;
}

AlignmentResult alignment_race(const SimConfig& config, unsigned threads) {
  const std::vector<Box> anchors = anchor_grid(config);
  const std::vector<Box> gts = gt_boxes(config);
  const ScaParams params{config.alpha};
  return {simulate(anchors, gts, kCenterAlignment, config.eta, config.iters, params, threads),
          simulate(anchors, gts, kCornerAlignment, config.eta, config.iters, params, threads)};
}

}  // namespace bboxlab
