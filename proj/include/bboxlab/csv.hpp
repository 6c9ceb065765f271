#pragma once

#include <iosfwd>
#include <string>

#include "bboxlab/experiments.hpp"

namespace bboxlab::csv {

/// Shortest "%.17g" rendering, which round-trips any double.
std::string number(double value);

// One header row, LF line endings, one record per line.
//   gradmag.csv      bin_lo,bin_hi,kind,count,mean_grad_norm
//   correlation.csv  iou,giou,so,overlapping   (+ one "# spearman..." footer)
//   simulate.csv     kind,iter,mean_iou,mean_corner_dist
//   align.csv        mode,iter,mean_iou,mean_corner_dist
//   gradcheck.csv    kind,pairs,max_rel_error
void write_gradmag(std::ostream& out, const BinnedStats& stats);
void write_correlation(std::ostream& out, const CorrelationTable& table);
void write_simulation(std::ostream& out, const SimulationResult& result);
void write_alignment(std::ostream& out, const AlignmentResult& result);
void write_gradcheck(std::ostream& out, const std::vector<GradCheckRow>& rows);

}  // namespace bboxlab::csv
