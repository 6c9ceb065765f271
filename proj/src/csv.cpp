#include "bboxlab/csv.hpp"

#include <cstdio>
#include <ostream>

namespace bboxlab::csv {

std::string number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_gradmag(std::ostream& out, const BinnedStats& stats) {
  out << "bin_lo,bin_hi,kind,count,mean_grad_norm\n";
  for (std::size_t bin = 0; bin < kIouBins; ++bin) {
    for (std::size_t k = 0; k < stats.kinds.size(); ++k) {
      const BinCell& cell = stats.cells[k][bin];
      out << number(stats.edges[bin]) << ',' << number(stats.edges[bin + 1]) << ','
          << to_string(stats.kinds[k]) << ',' << cell.count << ',' << number(cell.mean_grad_norm)
          << '\n';
    }
  }
}

void write_correlation(std::ostream& out, const CorrelationTable& table) {
  out << "iou,giou,so,overlapping\n";
  for (const CorrelationRow& row : table.rows) {
    out << number(row.iou) << ',' << number(row.giou) << ',' << number(row.so) << ','
        << (row.overlapping ? 1 : 0) << '\n';
  }
  out << "# spearman(so,iou | overlapping)=" << number(table.spearman_so_iou)
      << " overlapping=" << table.overlapping << " rows=" << table.rows.size() << '\n';
}

namespace {

void write_trajectory(std::ostream& out, std::string_view label, const Trajectory& t) {
  for (std::size_t i = 0; i < t.mean_iou.size(); ++i) {
    out << label << ',' << i << ',' << number(t.mean_iou[i]) << ','
        << number(t.mean_corner_dist[i]) << '\n';
  }
}

}  // namespace

void write_simulation(std::ostream& out, const SimulationResult& result) {
  out << "kind,iter,mean_iou,mean_corner_dist\n";
  for (const auto& [kind, trajectory] : result) write_trajectory(out, to_string(kind), trajectory);
}

void write_alignment(std::ostream& out, const AlignmentResult& result) {
  out << "mode,iter,mean_iou,mean_corner_dist\n";
  write_trajectory(out, "center", result.center);
  write_trajectory(out, "corner", result.corner);
}

void write_gradcheck(std::ostream& out, const std::vector<GradCheckRow>& rows) {
  out << "kind,pairs,max_rel_error\n";
  for (const GradCheckRow& row : rows) {
    out << to_string(row.kind) << ',' << row.pairs << ',' << number(row.max_rel_error) << '\n';
  }
}

}  // namespace bboxlab::csv
