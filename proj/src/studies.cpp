#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bboxlab/experiments.hpp"

namespace bboxlab {

std::size_t iou_bin(double iou_value) noexcept {
  if (!(iou_value > 0.0)) return 0;
  const auto bin = static_cast<std::size_t>(iou_value * static_cast<double>(kIouBins));
  return std::min(bin, kIouBins - 1);
}

const std::vector<BinCell>& BinnedStats::of(LossKind kind) const {
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    if (kinds[k] == kind) return cells[k];
  }
  throw std::out_of_range("loss kind not part of this study");
}

BinnedStats grad_magnitude_study(const PairSampler& sampler, const std::vector<LossKind>& kinds,
                                 const ScaParams& params, unsigned threads) {
  if (kinds.empty()) throw std::invalid_argument("gradient study needs at least one loss kind");
  if (sampler.count == 0) throw std::invalid_argument("sample count must be at least 1");

  struct Partial {
    std::vector<std::size_t> counts;
    std::vector<std::vector<double>> sums;  // [kind][bin]
    std::size_t skipped = 0;
  };
  std::vector<Partial> partials(sampler.block_count());

  parallel_for(partials.size(), threads, [&](std::size_t b) {
    Partial& part = partials[b];
    part.counts.assign(kIouBins, 0);
    part.sums.assign(kinds.size(), std::vector<double>(kIouBins, 0.0));
    std::vector<double> norms(kinds.size());
    for (const BoxPair& pair : sampler.block(b)) {
      try {
        const std::size_t bin = iou_bin(iou(pair));
        for (std::size_t k = 0; k < kinds.size(); ++k) {
          norms[k] = grad_magnitude(kinds[k], pair, params);
        }
        ++part.counts[bin];
        for (std::size_t k = 0; k < kinds.size(); ++k) part.sums[k][bin] += norms[k];
      } catch (const DegenerateBoxError&) {
        ++part.skipped;
      }
    }
  });

  BinnedStats stats;
  stats.kinds = kinds;
  for (std::size_t i = 0; i <= kIouBins; ++i) {
    stats.edges.push_back(static_cast<double>(i) / static_cast<double>(kIouBins));
  }
  std::vector<std::size_t> counts(kIouBins, 0);
  std::vector<std::vector<double>> sums(kinds.size(), std::vector<double>(kIouBins, 0.0));
  for (const Partial& part : partials) {
    stats.skipped_degenerate += part.skipped;
    for (std::size_t bin = 0; bin < kIouBins; ++bin) {
      counts[bin] += part.counts[bin];
      for (std::size_t k = 0; k < kinds.size(); ++k) sums[k][bin] += part.sums[k][bin];
    }
  }
  stats.sampled = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  stats.cells.assign(kinds.size(), std::vector<BinCell>(kIouBins));
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    for (std::size_t bin = 0; bin < kIouBins; ++bin) {
      BinCell& cell = stats.cells[k][bin];
      cell.count = counts[bin];
      cell.mean_grad_norm = counts[bin] ? sums[k][bin] / static_cast<double>(counts[bin]) : 0.0;
    }
  }
  return stats;
}

CorrelationRow correlation_row(const BoxPair& pair) {
  return {iou(pair), giou(pair), side_overlap(pair), intersection_area(pair) > 0.0};
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

void finish_table(CorrelationTable& table) {
  std::vector<double> so;
  std::vector<double> overlap;
  for (const CorrelationRow& row : table.rows) {
    if (!row.overlapping) continue;
    so.push_back(row.so);
    overlap.push_back(row.iou);
  }
  table.overlapping = so.size();
  table.spearman_so_iou = so.size() >= 2 ? spearman(so, overlap) : 0.0;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("spearman needs two equal-length series of at least 2 values");
  }
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = 0.5 * (n + 1.0);
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

CorrelationTable correlation_rows(const std::vector<BoxPair>& pairs) {
  CorrelationTable table;
  table.rows.reserve(pairs.size());
  for (const BoxPair& pair : pairs) table.rows.push_back(correlation_row(pair));
  finish_table(table);
  return table;
}

CorrelationTable correlation_study(const PairSampler& sampler, unsigned threads) {
  if (sampler.count == 0) throw std::invalid_argument("sample count must be at least 1");
  std::vector<std::vector<CorrelationRow>> blocks(sampler.block_count());
  parallel_for(blocks.size(), threads, [&](std::size_t b) {
    for (const BoxPair& pair : sampler.block(b)) blocks[b].push_back(correlation_row(pair));
  });
  CorrelationTable table;
  table.rows.reserve(sampler.count);
  for (const auto& block : blocks) table.rows.insert(table.rows.end(), block.begin(), block.end());
  finish_table(table);
  return table;
}

std::vector<GradCheckRow> gradient_check(const PairSampler& sampler,
                                         const std::vector<LossKind>& kinds,
                                         const ScaParams& params, double step, unsigned threads) {
  if (sampler.count == 0) throw std::invalid_argument("sample count must be at least 1");
  std::vector<std::vector<double>> worst(sampler.block_count(),
                                         std::vector<double>(kinds.size(), 0.0));
  parallel_for(worst.size(), threads, [&](std::size_t b) {
    for (const BoxPair& pair : sampler.block(b)) {
      for (std::size_t k = 0; k < kinds.size(); ++k) {
        const Grad4 analytic = eval_with_grad(kinds[k], pair, params).grad;
        const Grad4 numeric = fd_grad(kinds[k], pair, params, step);
        double err = max_relative_error(analytic, numeric);
        if (std::isnan(err)) err = INFINITY;
        worst[b][k] = std::max(worst[b][k], err);
      }
    }
  });

  std::vector<GradCheckRow> rows;
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    GradCheckRow row{kinds[k], sampler.count, 0.0};
    for (const auto& block : worst) row.max_rel_error = std::max(row.max_rel_error, block[k]);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bboxlab
