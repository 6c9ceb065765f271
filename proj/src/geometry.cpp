#include "bboxlab/geometry.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace bboxlab {

Box Box::normalized(double x1, double y1, double x2, double y2) {
  if (!std::isfinite(x1) || !std::isfinite(y1) || !std::isfinite(x2) || !std::isfinite(y2)) {
    throw std::invalid_argument("box coordinates must be finite");
  }
  Box b{x1, y1, x2, y2};
  repair_corners(b);
  return b;
}

bool repair_corners(Box& box) noexcept {
  bool moved = false;
  if (box.x1 > box.x2) {
    std::swap(box.x1, box.x2);
    moved = true;
  }
  if (box.y1 > box.y2) {
    std::swap(box.y1, box.y2);
    moved = true;
  }
  return moved;
}

BoxPair BoxPair::checked(const Box& pred, const Box& gt) {
  BoxPair pair{Box::normalized(pred.x1, pred.y1, pred.x2, pred.y2),
               Box::normalized(gt.x1, gt.y1, gt.x2, gt.y2)};
  side_terms(pair);
  return pair;
}

SideTerms side_terms_unchecked(const BoxPair& pair) noexcept {
  const Box& p = pair.pred;
  const Box& g = pair.gt;
  return {
      std::min(p.x2, g.x2) - std::max(p.x1, g.x1),
      std::max(p.x2, g.x2) - std::min(p.x1, g.x1),
      std::min(p.y2, g.y2) - std::max(p.y1, g.y1),
      std::max(p.y2, g.y2) - std::min(p.y1, g.y1),
  };
}

SideTerms side_terms(const BoxPair& pair) {
  const SideTerms t = side_terms_unchecked(pair);
  if (!(t.w_max > kEpsilon) || !(t.h_max > kEpsilon)) {
    throw DegenerateBoxError("degenerate box pair: both boxes collapse on one axis (" +
                             format_box(pair.pred) + " / " + format_box(pair.gt) + ")");
  }
  return t;
}

double intersection_area(const BoxPair& pair) noexcept {
  const SideTerms t = side_terms_unchecked(pair);
  return std::max(0.0, t.w_min) * std::max(0.0, t.h_min);
}

double union_area(const BoxPair& pair) noexcept {
  return pair.pred.area() + pair.gt.area() - intersection_area(pair);
}

Box enclosing_box(const BoxPair& pair) noexcept {
  const Box& p = pair.pred;
  const Box& g = pair.gt;
  return {std::min(p.x1, g.x1), std::min(p.y1, g.y1), std::max(p.x2, g.x2),
          std::max(p.y2, g.y2)};
}

double distance(const Point& a, const Point& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double enclosing_diagonal_sq(const BoxPair& pair) noexcept {
  const Box c = enclosing_box(pair);
  return c.width() * c.width() + c.height() * c.height();
}

std::string format_box(const Box& box) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g", box.x1, box.y1, box.x2, box.y2);
  return buf;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, std::string_view whole) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw BoxParseError("parse error: malformed box '" + std::string(whole) +
                        "', expected x1,y1,x2,y2");
  }
  return value;
}

}  // namespace

Box parse_box(std::string_view text) {
  std::array<double, 4> v{};
  std::size_t field = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      if (field == v.size()) {
        throw BoxParseError("parse error: malformed box '" + std::string(text) +
                            "', expected x1,y1,x2,y2");
      }
      v[field++] = parse_field(text.substr(start, i - start), text);
      start = i + 1;
    }
  }
  if (field != v.size()) {
    throw BoxParseError("parse error: malformed box '" + std::string(text) +
                        "', expected x1,y1,x2,y2");
  }
  return {v[0], v[1], v[2], v[3]};
}

}  // namespace bboxlab
