#pragma once

#include <string>
#include <vector>

#include "billiard/dynamics.hpp"
#include "billiard/geometry.hpp"

namespace billiard {

// ---------------------------------------------------------------------------
// Built-in billiard families used by the tools and the test suite.
// ---------------------------------------------------------------------------

// Axis-aligned rectangular hole: size (w, h), lower-left corner at (x, y).
struct RectHole {
  double w = 0.0, h = 0.0, x = 0.0, y = 0.0;
};

// Rectangle [0,a] x [0,b] with axis-aligned rectangular holes. Hole sizes and
// offsets may be arbitrary reals; they become named basis atoms unless a
// small exact rational matches.
BilliardSpec make_rect_holes(const Rat& a, const Rat& b, const std::vector<RectHole>& holes);

// The same rectangle with every hole rotated 45 degrees about its center.
BilliardSpec make_rotated_holes(const Rat& a, const Rat& b,
                                const std::vector<RectHole>& holes);

// Right triangle (0,0), (1,0), (1, sqrt3) with a circular scatterer of radius
// r centered at (w, sqrt3*h). Raises HoleOutsideOuter / BadParameters.
CurvedBilliard make_sinai(double w, double h, double r);

// The same triangle with the circle replaced by the regular 12-gon tangent to
// it at the twelve 30-degree directions.
BilliardSpec make_sinai_polygon(double w, double h, double r);

// Scatterer parameters whose shortest periodic orbits touch the circle on the
// 30-degree grid: the center sits at the triangle's incenter.
struct SinaiParams {
  double w = 0.0, h = 0.0, r = 0.0;
};
SinaiParams sinai_defaults();

// Named dispatch: "rect-holes", "rect-rotated-holes", "sinai" (the polygon
// form). `holes` sets the hole count for the rectangle families. Raises
// UnknownFamily for other names, BadParameters for bad hole counts.
BilliardSpec builtin_family(const std::string& name, int holes = 1);
bool is_builtin_family(const std::string& name);

}  // namespace billiard
