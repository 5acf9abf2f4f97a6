#include "billiard/families.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "billiard/errors.hpp"

namespace billiard {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3_v<double>;

// Symbolic coordinate for a family parameter: exact rational when a small
// denominator matches the value, otherwise a named basis atom.
SymbolicCoord named_coord(double v, const std::string& name, Basis& basis) {
  if (auto r = rat_from_double(v, 10000, 1e-9)) return SymbolicCoord::rational(*r);
  return SymbolicCoord::atom(basis.find_or_add(name, v), v);
}

SymPoint rect_corner(const SymbolicCoord& x, const SymbolicCoord& y) {
  return {x, y};
}

}  // namespace

BilliardSpec make_rect_holes(const Rat& a, const Rat& b, const std::vector<RectHole>& holes) {
  if (!(a.value() > 0.0) || !(b.value() > 0.0))
    fail(Errc::BadParameters, "rectangle sides must be positive");
  Basis basis;
  std::vector<std::vector<SymPoint>> polys;
  SymbolicCoord zero{Rat(0)}, ax{a}, by{b};
  polys.push_back({rect_corner(zero, zero), rect_corner(ax, zero), rect_corner(ax, by),
                   rect_corner(zero, by)});
  for (size_t i = 0; i < holes.size(); ++i) {
    const RectHole& hh = holes[i];
    if (!(hh.w > 0.0) || !(hh.h > 0.0))
      fail(Errc::BadParameters, "hole sides must be positive");
    std::string tag = "hole" + std::to_string(i);
    SymbolicCoord x0 = named_coord(hh.x, tag + "_x", basis);
    SymbolicCoord y0 = named_coord(hh.y, tag + "_y", basis);
    SymbolicCoord x1 = sym_add(x0, named_coord(hh.w, tag + "_w", basis));
    SymbolicCoord y1 = sym_add(y0, named_coord(hh.h, tag + "_h", basis));
    polys.push_back({rect_corner(x0, y0), rect_corner(x1, y0), rect_corner(x1, y1),
                     rect_corner(x0, y1)});
  }
  basis.auto_link();
  return make_billiard(std::move(basis), std::move(polys));
}

BilliardSpec make_rotated_holes(const Rat& a, const Rat& b,
                                const std::vector<RectHole>& holes) {
  if (!(a.value() > 0.0) || !(b.value() > 0.0))
    fail(Errc::BadParameters, "rectangle sides must be positive");
  Basis basis;
  std::vector<std::vector<SymPoint>> polys;
  SymbolicCoord zero{Rat(0)}, ax{a}, by{b};
  polys.push_back({rect_corner(zero, zero), rect_corner(ax, zero), rect_corner(ax, by),
                   rect_corner(zero, by)});
  double inv2s2 = 1.0 / (2.0 * std::numbers::sqrt2_v<double>);
  for (size_t i = 0; i < holes.size(); ++i) {
    const RectHole& hh = holes[i];
    if (!(hh.w > 0.0) || !(hh.h > 0.0))
      fail(Errc::BadParameters, "hole sides must be positive");
    std::string tag = "hole" + std::to_string(i);
    // Center of the hole, then the rotated half-diagonals along the axes.
    SymbolicCoord cx = named_coord(hh.x + 0.5 * hh.w, tag + "_cx", basis);
    SymbolicCoord cy = named_coord(hh.y + 0.5 * hh.h, tag + "_cy", basis);
    SymbolicCoord M = named_coord((hh.w - hh.h) * inv2s2, tag + "_M", basis);
    SymbolicCoord P = named_coord((hh.w + hh.h) * inv2s2, tag + "_P", basis);
    polys.push_back({rect_corner(sym_add(cx, M), sym_add(cy, P)),
                     rect_corner(sym_sub(cx, P), sym_sub(cy, M)),
                     rect_corner(sym_sub(cx, M), sym_sub(cy, P)),
                     rect_corner(sym_add(cx, P), sym_add(cy, M))});
  }
  basis.auto_link();
  return make_billiard(std::move(basis), std::move(polys));
}

CurvedBilliard make_sinai(double w, double h, double r) {
  std::vector<Vec2> tri{{0.0, 0.0}, {1.0, 0.0}, {1.0, kSqrt3}};
  return make_curved(std::move(tri), {Circle{{w, kSqrt3 * h}, r}});
}

BilliardSpec make_sinai_polygon(double w, double h, double r) {
  make_sinai(w, h, r);  // reuse the geometric validation
  Basis basis;
  int sq = basis.find_or_add("sqrt3", kSqrt3);
  SymbolicCoord cx = named_coord(w, "w", basis);
  SymbolicCoord cy = named_coord(kSqrt3 * h, "h_sqrt3", basis);
  SymbolicCoord rr = named_coord(r, "r", basis);
  // sqrt(3) companions keep every 30-degree rotation of these coords exact.
  ensure_sqrt3_closure(basis);

  std::vector<std::vector<SymPoint>> polys;
  SymbolicCoord zero{Rat(0)}, one{Rat(1)};
  polys.push_back({rect_corner(zero, zero), rect_corner(one, zero),
                   rect_corner(one, SymbolicCoord::atom(sq, kSqrt3))});

  // Regular 12-gon tangent to the circle at the twelve 30-degree directions:
  // vertex_j = center + r * (dir(pi j/6) + tan(pi/12) * perp(pi j/6)).
  Q3 tan15{Rat(2), Rat(-1)};
  std::vector<SymPoint> hole;
  for (int j = 0; j < 12; ++j) {
    auto cs = exact_cos_sin_pi(Rat(j, 6));
    Q3 ux = cs->first - tan15 * cs->second;
    Q3 uy = cs->second + tan15 * cs->first;
    SymbolicCoord vx = sym_add(cx, sym_scale_q3(rr, ux, basis));
    SymbolicCoord vy = sym_add(cy, sym_scale_q3(rr, uy, basis));
    if (!vx.exact || !vy.exact)
      fail(Errc::MixedBasis, "12-gon vertex did not stay exact over the basis");
    hole.push_back({std::move(vx), std::move(vy)});
  }
  polys.push_back(std::move(hole));
  return make_billiard(std::move(basis), std::move(polys));
}

SinaiParams sinai_defaults() {
  // Incenter of the (1, sqrt3, 2) right triangle: inradius (sqrt3-1)/2.
  double rho = 0.5 * (kSqrt3 - 1.0);
  return {1.0 - rho, rho / kSqrt3, 0.25};
}

BilliardSpec builtin_family(const std::string& name, int holes) {
  if (name == "sinai") {
    SinaiParams p = sinai_defaults();
    return make_sinai_polygon(p.w, p.h, p.r);
  }
  if (name != "rect-holes" && name != "rect-rotated-holes")
    fail(Errc::UnknownFamily, "unknown builtin family: " + name);
  if (holes < 0 || holes > 8)
    fail(Errc::BadParameters, "hole count must be between 0 and 8");
  // Hole sizes shrink with the count so that even the rotated copies stay
  // disjoint: the rotated bounding half-width (w+h)/(2*sqrt(2)) is below half
  // the center spacing 1/(holes+1) for every admissible count.
  double scale = 2.0 / (holes + 1.0);
  double w = scale * std::numbers::sqrt2_v<double> / 8.0;
  double h = scale * kSqrt3 / 6.0;
  std::vector<RectHole> hs;
  for (int i = 0; i < holes; ++i) {
    double cxi = (i + 1.0) / (holes + 1.0);
    hs.push_back({w, h, cxi - 0.5 * w, 0.5 - 0.5 * h});
  }
  if (name == "rect-holes") return make_rect_holes(Rat(1), Rat(1), hs);
  return make_rotated_holes(Rat(1), Rat(1), hs);
}

bool is_builtin_family(const std::string& name) {
  return name == "rect-holes" || name == "rect-rotated-holes" || name == "sinai";
}

}  // namespace billiard
