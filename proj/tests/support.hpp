#pragma once

// Test-only reference implementations and random pair generators. Nothing in
// here calls into the library's loss code, so the references stay an
// independent route to the same numbers.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "bboxlab/geometry.hpp"

namespace oracle {

using bboxlab::Box;
using bboxlab::BoxPair;
using real = long double;

// Areas by coordinate compression: split the plane on every distinct edge
// and add up the cells covered by either box (union) or by both
// (intersection).
inline real covered_area(const Box& a, const Box& b, bool both) {
  std::array<real, 4> xs{a.x1, a.x2, b.x1, b.x2};
  std::array<real, 4> ys{a.y1, a.y2, b.y1, b.y2};
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  auto covers = [](const Box& box, real cx, real cy) {
    return box.x1 <= cx && cx <= box.x2 && box.y1 <= cy && cy <= box.y2;
  };
  real total = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const real w = xs[i + 1] - xs[i];
      const real h = ys[j + 1] - ys[j];
      if (w <= 0 || h <= 0) continue;
      const real cx = (xs[i] + xs[i + 1]) / 2;
      const real cy = (ys[j] + ys[j + 1]) / 2;
      const bool in_a = covers(a, cx, cy), in_b = covers(b, cx, cy);
      if (both ? (in_a && in_b) : (in_a || in_b)) total += w * h;
    }
  }
  return total;
}

inline real union_area(const Box& a, const Box& b) { return covered_area(a, b, false); }

inline real intersection_area(const Box& a, const Box& b) { return covered_area(a, b, true); }

inline real area(const Box& b) { return static_cast<real>(b.x2 - b.x1) * (b.y2 - b.y1); }

inline real hull_area(const Box& a, const Box& b) {
  const real w = std::max<real>(a.x2, b.x2) - std::min<real>(a.x1, b.x1);
  const real h = std::max<real>(a.y2, b.y2) - std::min<real>(a.y1, b.y1);
  return w * h;
}

inline real iou(const Box& a, const Box& b) { return intersection_area(a, b) / union_area(a, b); }

inline real giou(const Box& a, const Box& b) {
  const real hull = hull_area(a, b);
  return iou(a, b) - (hull - union_area(a, b)) / hull;
}

// Signed overlap of [a1, a2] and [b1, b2] is len_a + len_b - span.
inline real signed_overlap_ratio(real a1, real a2, real b1, real b2) {
  const real span = std::max(a2, b2) - std::min(a1, b1);
  return ((a2 - a1) + (b2 - b1) - span) / span;
}

inline real side_overlap(const Box& a, const Box& b) {
  return signed_overlap_ratio(a.x1, a.x2, b.x1, b.x2) +
         signed_overlap_ratio(a.y1, a.y2, b.y1, b.y2);
}

inline real diag_sq(const Box& a, const Box& b) {
  const real w = std::max<real>(a.x2, b.x2) - std::min<real>(a.x1, b.x1);
  const real h = std::max<real>(a.y2, b.y2) - std::min<real>(a.y1, b.y1);
  return w * w + h * h;
}

inline real center_penalty(const Box& a, const Box& b) {
  const real dx = (static_cast<real>(a.x1) + a.x2 - b.x1 - b.x2) / 2;
  const real dy = (static_cast<real>(a.y1) + a.y2 - b.y1 - b.y2) / 2;
  return (dx * dx + dy * dy) / diag_sq(a, b);
}

inline real diou(const Box& a, const Box& b) { return iou(a, b) - center_penalty(a, b); }

inline real ciou(const Box& a, const Box& b) {
  const real pi = std::numbers::pi_v<real>;
  const real gap = std::atan(static_cast<real>(b.x2 - b.x1) / (b.y2 - b.y1)) -
                   std::atan(static_cast<real>(a.x2 - a.x1) / (a.y2 - a.y1));
  const real v = 4 / (pi * pi) * gap * gap;
  const real overlap = iou(a, b);
  const real denom = (1 - overlap) + v;
  const real weight = denom > 0 ? v / denom : 0;
  return diou(a, b) - weight * v;
}

inline real corner_distance(const Box& a, const Box& b) {
  const real d1 = std::hypot(static_cast<real>(a.x1) - b.x1, static_cast<real>(a.y1) - b.y1);
  const real d2 = std::hypot(static_cast<real>(a.x2) - b.x2, static_cast<real>(a.y2) - b.y2);
  return (d1 + d2) / std::sqrt(diag_sq(a, b));
}

// Five-point central difference in long double, for cross-checking both the
// analytic gradients and the library's own finite differences.
template <class F>
std::array<real, 4> gradient(F&& loss, const Box& pred, real h = 1e-5L) {
  std::array<real, 4> g{};
  for (int i = 0; i < 4; ++i) {
    auto at = [&](real offset) {
      Box p = pred;
      double* c[] = {&p.x1, &p.y1, &p.x2, &p.y2};
      *c[i] = static_cast<double>(static_cast<real>(*c[i]) + offset);
      return static_cast<real>(loss(p));
    };
    g[i] = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
  }
  return g;
}

}  // namespace oracle

namespace gen {

using bboxlab::Box;
using bboxlab::BoxPair;

/// Mixture of pair shapes used by the property tests: generic, wide dynamic
/// range, nested, concentric, far apart, identical and edge-sharing pairs.
class PairGen {
 public:
  explicit PairGen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  Box box_around(double cx, double cy, double w, double h) {
    return {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
  }

  Box generic_box(double extent = 10.0) {
    return box_around(uniform(-extent, extent), uniform(-extent, extent), log_uniform(0.05, extent),
                      log_uniform(0.05, extent));
  }

  BoxPair next() {
    switch (std::uniform_int_distribution<int>(0, 6)(rng_)) {
      case 0: return {generic_box(), generic_box()};
      case 1: {
        const double s = log_uniform(1e-3, 1e3);
        return {generic_box().scaled(s), generic_box().scaled(s)};
      }
      case 2: {
        const Box outer = generic_box();
        const double fx = uniform(0.0, 0.9), fy = uniform(0.0, 0.9);
        const double fw = uniform(0.05, 1.0 - fx), fh = uniform(0.05, 1.0 - fy);
        const Box inner{outer.x1 + fx * outer.width(), outer.y1 + fy * outer.height(),
                        outer.x1 + (fx + fw) * outer.width(), outer.y1 + (fy + fh) * outer.height()};
        return uniform(0, 1) < 0.5 ? BoxPair{inner, outer} : BoxPair{outer, inner};
      }
      case 3: {
        const double cx = uniform(-5, 5), cy = uniform(-5, 5);
        return {box_around(cx, cy, log_uniform(0.1, 5), log_uniform(0.1, 5)),
                box_around(cx, cy, log_uniform(0.1, 5), log_uniform(0.1, 5))};
      }
      case 4: {
        const Box a = generic_box(1.0);
        const double far = log_uniform(10.0, 1e4);
        return {a, generic_box(1.0).translated(far, uniform(-far, far))};
      }
      case 5: {
        const Box a = generic_box();
        return {a, a};
      }
      default: {
        // Dyadic coordinates, so edges coincide exactly and often.
        auto coord = [&] { return std::uniform_int_distribution<int>(-8, 8)(rng_) * 0.25; };
        auto box = [&] {
          double x1 = coord(), x2 = coord(), y1 = coord(), y2 = coord();
          if (x1 == x2) x2 += 0.5;
          if (y1 == y2) y2 += 0.5;
          return Box::normalized(x1, y1, x2, y2);
        };
        return {box(), box()};
      }
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gen
