#pragma once

#include <doctest.h>

#include <utility>

#include "billiard/errors.hpp"
#include "billiard/geometry.hpp"

// ---------------------------------------------------------------------------
// Shared helpers for the unit tests.
// ---------------------------------------------------------------------------

// Checks that fn throws billiard::Error with exactly the given code.
template <typename Fn>
void expect_errc(billiard::Errc code, Fn&& fn) {
  bool threw = false;
  try {
    std::forward<Fn>(fn)();
  } catch (const billiard::Error& e) {
    threw = true;
    CHECK(e.code() == code);
    if (e.code() != code) MESSAGE("unexpected error: ", e.what());
  }
  CHECK_MESSAGE(threw, "expected error code ", billiard::errc_name(code));
}

// Distance from p to the closed segment [a, b].
inline double seg_dist(billiard::Vec2 p, billiard::Vec2 a, billiard::Vec2 b) {
  billiard::Vec2 d = b - a;
  double len2 = billiard::norm2(d);
  if (len2 == 0.0) return billiard::dist(p, a);
  double t = billiard::dot(p - a, d) / len2;
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  return billiard::dist(p, a + t * d);
}

// Distance from p to the nearest boundary side of the domain.
inline double boundary_clearance(const billiard::BilliardSpec& spec, billiard::Vec2 p) {
  double best = 1e300;
  for (const auto& poly : spec.polygons) {
    int n = poly.size();
    for (int i = 0; i < n; ++i) {
      double d = seg_dist(p, poly.pts[i], poly.pts[(i + 1) % n]);
      if (d < best) best = d;
    }
  }
  return best;
}

// True if p is inside the open domain with at least `clearance` to walls.
inline bool well_inside(const billiard::BilliardSpec& spec, billiard::Vec2 p, double clearance) {
  return billiard::point_in_domain(spec, p, 0.0) && boundary_clearance(spec, p) > clearance;
}
