#include "svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace bboxlab::plot {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

}  // namespace

std::string render_svg(const Figure& figure) {
  Range xr, yr;
  for (const Series& s : figure.series) {
    for (std::size_t i = 0; i < std::min(s.xs.size(), s.ys.size()); ++i) {
      if (std::isfinite(s.xs[i]) && std::isfinite(s.ys[i])) {
        xr.add(s.xs[i]);
        yr.add(s.ys[i]);
      }
    }
  }
  xr.settle();
  yr.settle();

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
      << "font-family=\"sans-serif\">" << escape(figure.title) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

  svg << "<g font-size=\"11\" font-family=\"sans-serif\">\n";
  svg << "<text x=\"" << kLeft << "\" y=\"" << kTop + plot_h + 16 << "\" text-anchor=\"middle\">"
      << fmt(xr.lo) << "</text>\n";
  svg << "<text x=\"" << kLeft + plot_w << "\" y=\"" << kTop + plot_h + 16
      << "\" text-anchor=\"middle\">" << fmt(xr.hi) << "</text>\n";
  svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + plot_h + 4 << "\" text-anchor=\"end\">"
      << fmt(yr.lo) << "</text>\n";
  svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 4 << "\" text-anchor=\"end\">"
      << fmt(yr.hi) << "</text>\n";
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << escape(figure.x_label) << "</text>\n";
  svg << "<text transform=\"translate(18," << kTop + plot_h / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(figure.y_label) << "</text>\n";
  svg << "</g>\n";

  for (std::size_t k = 0; k < figure.series.size(); ++k) {
    const Series& s = figure.series[k];
    const char* color = kPalette[k % kPalette.size()];
    const std::size_t n = std::min(s.xs.size(), s.ys.size());
    if (s.scatter) {
      svg << "<g fill=\"" << color << "\" fill-opacity=\"0.5\">\n";
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
        svg << "<circle cx=\"" << fmt(px(s.xs[i])) << "\" cy=\"" << fmt(py(s.ys[i]))
            << "\" r=\"1.5\"/>\n";
      }
      svg << "</g>\n";
    } else {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
        svg << fmt(px(s.xs[i])) << ',' << fmt(py(s.ys[i])) << ' ';
      }
      svg << "\"/>\n";
    }
    const double ly = kTop + 12 + 18 * static_cast<double>(k);
    svg << "<rect x=\"" << kWidth - kRight + 12 << "\" y=\"" << ly - 8
        << "\" width=\"14\" height=\"4\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << kWidth - kRight + 32 << "\" y=\"" << ly
        << "\" font-size=\"12\" font-family=\"sans-serif\">" << escape(s.name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace bboxlab::plot
