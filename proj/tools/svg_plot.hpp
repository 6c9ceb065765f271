#pragma once

#include <string>
#include <vector>

namespace bboxlab::plot {

struct Series {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
  bool scatter = false;
};

struct Figure {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Standalone SVG document: frame, min/max tick labels, one polyline or dot
/// cloud per series, and a legend. Non-finite points are dropped.
std::string render_svg(const Figure& figure);

}  // namespace bboxlab::plot
