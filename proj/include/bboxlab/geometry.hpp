#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bboxlab {

/// Smallest divisor any ratio in the library is allowed to see.
inline constexpr double kEpsilon = 1e-12;

/// Raised when a pair collapses on an axis (both boxes have zero extent
/// along x or along y), which leaves the side and area ratios undefined.
class DegenerateBoxError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by the text parsers on malformed box strings.
class BoxParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned box stored by its top-left (x1, y1) and bottom-right (x2, y2)
/// corners. Aggregate initialization is the raw, unchecked path; use
/// Box::normalized() when the corners may arrive inverted.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  /// Validating constructor: rejects non-finite input and swaps corners so
  /// that x1 <= x2 and y1 <= y2.
  static Box normalized(double x1, double y1, double x2, double y2);

  [[nodiscard]] constexpr double width() const noexcept { return x2 - x1; }
  [[nodiscard]] constexpr double height() const noexcept { return y2 - y1; }
  [[nodiscard]] constexpr double area() const noexcept { return width() * height(); }
  [[nodiscard]] constexpr Point top_left() const noexcept { return {x1, y1}; }
  [[nodiscard]] constexpr Point bottom_right() const noexcept { return {x2, y2}; }
  [[nodiscard]] constexpr Point center() const noexcept {
    return {0.5 * (x1 + x2), 0.5 * (y1 + y2)};
  }
  [[nodiscard]] constexpr bool is_ordered() const noexcept { return x1 <= x2 && y1 <= y2; }

  [[nodiscard]] constexpr Box translated(double dx, double dy) const noexcept {
    return {x1 + dx, y1 + dy, x2 + dx, y2 + dy};
  }
  [[nodiscard]] constexpr Box scaled(double s) const noexcept {
    return {x1 * s, y1 * s, x2 * s, y2 * s};
  }

  friend constexpr bool operator==(const Box&, const Box&) = default;
};

/// Swaps inverted corners in place. Returns true if anything moved.
bool repair_corners(Box& box) noexcept;

struct BoxPair {
  Box pred;
  Box gt;

  /// Validating entry point: both boxes normalized, and the pair rejected
  /// with DegenerateBoxError when both collapse on the same axis.
  static BoxPair checked(const Box& pred, const Box& gt);

  [[nodiscard]] constexpr BoxPair swapped() const noexcept { return {gt, pred}; }
};

/// Per-axis overlap terms. w_min/h_min go negative when the boxes are
/// separated along that axis.
struct SideTerms {
  double w_min = 0.0;
  double w_max = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
};

double intersection_area(const BoxPair& pair) noexcept;
double union_area(const BoxPair& pair) noexcept;
Box enclosing_box(const BoxPair& pair) noexcept;

/// Throws DegenerateBoxError when w_max or h_max is at most kEpsilon.
SideTerms side_terms(const BoxPair& pair);

/// Same formulas without the degeneracy check.
SideTerms side_terms_unchecked(const BoxPair& pair) noexcept;

double distance(const Point& a, const Point& b) noexcept;

/// Squared diagonal of the enclosing box.
double enclosing_diagonal_sq(const BoxPair& pair) noexcept;

/// "x1,y1,x2,y2" with 17 significant digits, enough to round-trip a double.
std::string format_box(const Box& box);

/// Parses "x1,y1,x2,y2" (whitespace around fields allowed). Throws
/// BoxParseError on anything else. Corners are taken as given; callers
/// wanting repair should pass the result through Box::normalized().
Box parse_box(std::string_view text);

}  // namespace bboxlab
