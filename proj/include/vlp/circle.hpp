#pragma once

// Circle primitives: algebraic least-squares fit and the exact minimum
// enclosing circle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "vlp/camera_model.hpp"
#include "vlp/error.hpp"

namespace vlp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

struct CircleFit {
  PixelPoint center;
  double radius = 0.0;        // px
  double rms_residual = 0.0;  // px, geometric distance to the fitted circle
};

/// Algebraic (Kasa) least-squares circle fit: minimizes
/// sum (x^2 + y^2 + D x + E y + F)^2 over the points. Solved in centered
/// coordinates, where the normal equations reduce to a 2x2 system.
inline CircleFit fit_circle(std::span<const PixelPoint> points) {
  if (points.size() < 3)
    throw Error(ErrorCode::DegenerateCircle,
                "circle fit needs at least 3 points, got " + std::to_string(points.size()));

  const double n = static_cast<double>(points.size());
  double mu = 0.0, mv = 0.0;
  for (const auto& p : points) {
    mu += p.u;
    mv += p.v;
  }
  mu /= n;
  mv /= n;

  double suu = 0, svv = 0, suv = 0, suuu = 0, svvv = 0, suvv = 0, svuu = 0;
  for (const auto& p : points) {
    const double a = p.u - mu;
    const double b = p.v - mv;
    suu += a * a;
    svv += b * b;
    suv += a * b;
    suuu += a * a * a;
    svvv += b * b * b;
    suvv += a * b * b;
    svuu += b * a * a;
  }

  const double det = suu * svv - suv * suv;
  const double spread = suu + svv;
  // det vanishes exactly for collinear (or coincident) points.
  if (!(spread > 0.0) || det <= 1e-12 * spread * spread)
    throw Error(ErrorCode::DegenerateCircle, "points are collinear or coincident");

  const double r1 = 0.5 * (suuu + suvv);
  const double r2 = 0.5 * (svvv + svuu);
  const double cu = (r1 * svv - suv * r2) / det;
  const double cv = (suu * r2 - suv * r1) / det;
  const double radius = std::sqrt(cu * cu + cv * cv + spread / n);

  CircleFit fit;
  fit.center = {mu + cu, mv + cv};
  fit.radius = radius;
  double ss = 0.0;
  for (const auto& p : points) {
    const double r = std::hypot(p.u - fit.center.u, p.v - fit.center.v) - radius;
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

namespace detail {

inline bool encloses(const Circle& c, Vec2 p) noexcept {
  return distance(c.center, p) <= c.radius + 1e-12 * std::max(1.0, c.radius);
}

inline Circle diameter_circle(Vec2 a, Vec2 b) noexcept {
  return {{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}, 0.5 * distance(a, b)};
}

inline Circle circumcircle(Vec2 a, Vec2 b, Vec2 c) noexcept {
  const double bx = b.x - a.x, by = b.y - a.y;
  const double cx = c.x - a.x, cy = c.y - a.y;
  const double d = 2.0 * (bx * cy - by * cx);
  if (d == 0.0) {
    // Collinear: the farthest pair spans the other point.
    Circle best = diameter_circle(a, b);
    for (const Circle& cand : {diameter_circle(a, c), diameter_circle(b, c)})
      if (cand.radius > best.radius) best = cand;
    return best;
  }
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  const double ux = (cy * b2 - by * c2) / d;
  const double uy = (bx * c2 - cx * b2) / d;
  return {{a.x + ux, a.y + uy}, std::hypot(ux, uy)};
}

}  // namespace detail

/// Smallest circle containing every point (Welzl's algorithm in its iterative
/// move-to-front form). Input order is shuffled with a fixed seed so the
/// expected running time is linear and the result is reproducible.
inline Circle min_enclosing_circle(std::span<const Vec2> input) {
  if (input.empty()) throw Error(ErrorCode::EmptyInput, "no points to enclose");

  std::vector<Vec2> pts(input.begin(), input.end());
  std::mt19937_64 shuffle_rng(0x5eedc1c1e5ULL);
  std::shuffle(pts.begin(), pts.end(), shuffle_rng);

  Circle c{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (detail::encloses(c, pts[i])) continue;
    c = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (detail::encloses(c, pts[j])) continue;
      c = detail::diameter_circle(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (detail::encloses(c, pts[k])) continue;
        c = detail::circumcircle(pts[i], pts[j], pts[k]);
      }
    }
  }
  return c;
}

}  // namespace vlp
