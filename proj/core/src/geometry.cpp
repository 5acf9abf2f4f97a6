#include "billiard/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace billiard {

double norm(Vec2 a) { return std::sqrt(norm2(a)); }
double dist(Vec2 a, Vec2 b) { return norm(a - b); }

double RationalAngle::radians() const { return pi_units.value() * std::numbers::pi; }

// ---------------------------------------------------------------------------
// Elementary transforms
// ---------------------------------------------------------------------------

Vec2 reflect(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 d = b - a;
  double len2 = norm2(d);
  if (len2 <= kGeomTol * kGeomTol) fail(Errc::DegenerateLine, "reflection line endpoints coincide");
  Vec2 rel = p - a;
  double proj = dot(rel, d) / len2;
  Vec2 foot = a + proj * d;
  return foot + (foot - p);
}

Vec2 rotate(Vec2 p, Vec2 center, const Rat& angle_pi_units) {
  double ang = angle_pi_units.value() * std::numbers::pi;
  double c = std::cos(ang), s = std::sin(ang);
  // Snap entries for exactly representable angles to kill rounding drift.
  if (auto exact = exact_cos_sin_pi(angle_pi_units)) {
    c = exact->first.value();
    s = exact->second.value();
  }
  Vec2 rel = p - center;
  return center + Vec2{c * rel.x - s * rel.y, s * rel.x + c * rel.y};
}

// ---------------------------------------------------------------------------
// Polygon predicates
// ---------------------------------------------------------------------------

namespace {

double signed_area(const std::vector<Vec2>& pts) {
  double area = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % pts.size()];
    area += cross(a, b);
  }
  return 0.5 * area;
}

double point_segment_dist(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 d = b - a;
  double len2 = norm2(d);
  if (len2 == 0.0) return dist(p, a);
  double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return dist(p, a + t * d);
}

// Proper or touching intersection of closed segments, with tolerance.
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
  double d1 = cross(b - a, c - a);
  double d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c);
  double d4 = cross(d - c, b - c);
  if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
      ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol)))
    return true;
  if (point_segment_dist(c, a, b) <= tol) return true;
  if (point_segment_dist(d, a, b) <= tol) return true;
  if (point_segment_dist(a, c, d) <= tol) return true;
  if (point_segment_dist(b, c, d) <= tol) return true;
  return false;
}

bool polygon_is_simple(const std::vector<Vec2>& pts, double tol) {
  int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) {
    Vec2 a = pts[i], b = pts[(i + 1) % n];
    if (dist(a, b) <= tol) return false;  // degenerate side
    for (int j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(a, b, pts[j], pts[(j + 1) % n], tol)) return false;
    }
  }
  return true;
}

bool point_strictly_inside(const std::vector<Vec2>& poly, Vec2 p, double tol) {
  for (size_t i = 0; i < poly.size(); ++i)
    if (point_segment_dist(p, poly[i], poly[(i + 1) % poly.size()]) <= tol) return false;
  return point_in_polygon(poly, p, 0.0);
}

}  // namespace

bool point_in_polygon(const std::vector<Vec2>& poly, Vec2 p, double tol) {
  if (tol > 0.0) {
    for (size_t i = 0; i < poly.size(); ++i)
      if (point_segment_dist(p, poly[i], poly[(i + 1) % poly.size()]) <= tol) return true;
  }
  bool inside = false;
  int n = static_cast<int>(poly.size());
  for (int i = 0, j = n - 1; i < n; j = i++) {
    bool crosses = (poly[i].y > p.y) != (poly[j].y > p.y);
    if (crosses) {
      double xi = poly[j].x + (p.y - poly[j].y) / (poly[i].y - poly[j].y) * (poly[i].x - poly[j].x);
      if (p.x < xi) inside = !inside;
    }
  }
  return inside;
}

bool point_in_domain(const BilliardSpec& spec, Vec2 p, double tol) {
  if (!point_in_polygon(spec.polygons[0].pts, p, tol)) return false;
  for (size_t l = 1; l < spec.polygons.size(); ++l) {
    const auto& hole = spec.polygons[l].pts;
    // In the closed domain only strict hole interiors are excluded.
    bool on_boundary = false;
    for (size_t i = 0; i < hole.size(); ++i)
      if (point_segment_dist(p, hole[i], hole[(i + 1) % hole.size()]) <= tol) {
        on_boundary = true;
        break;
      }
    if (!on_boundary && point_in_polygon(hole, p, 0.0)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// make_billiard
// ---------------------------------------------------------------------------

int BilliardSpec::total_sides() const {
  int n = 0;
  for (const auto& poly : polygons) n += poly.size();
  return n;
}

BilliardSpec make_billiard(Basis basis, std::vector<std::vector<SymPoint>> polygons) {
  if (polygons.empty()) fail(Errc::EmptyInput, "no polygons given");
  BilliardSpec spec;
  spec.basis = std::move(basis);
  spec.basis.auto_link();

  // Materialize numeric points and normalize orientation: outer CCW, holes CW,
  // so the domain interior is always on the left of the traversal.
  for (size_t l = 0; l < polygons.size(); ++l) {
    Polygon poly;
    poly.is_hole = l > 0;
    poly.vertices = std::move(polygons[l]);
    if (poly.vertices.size() < 3)
      fail(Errc::NonSimplePolygon, "polygon " + std::to_string(l + 1) + " has fewer than 3 vertices");
    for (auto& v : poly.vertices) {
      v.x.value = evaluate_symbolic(v.x, spec.basis);
      v.y.value = evaluate_symbolic(v.y, spec.basis);
      poly.pts.push_back({v.x.value, v.y.value});
    }
    double area = signed_area(poly.pts);
    bool want_ccw = !poly.is_hole;
    if ((area > 0) != want_ccw) {
      std::reverse(poly.vertices.begin(), poly.vertices.end());
      std::reverse(poly.pts.begin(), poly.pts.end());
    }
    if (!polygon_is_simple(poly.pts, kGeomTol))
      fail(Errc::NonSimplePolygon, "polygon " + std::to_string(l + 1) + " self-intersects");
    spec.polygons.push_back(std::move(poly));
  }

  // Containment: every hole strictly inside the outer polygon, holes disjoint.
  const auto& outer = spec.polygons[0].pts;
  for (size_t l = 1; l < spec.polygons.size(); ++l) {
    for (const Vec2& p : spec.polygons[l].pts)
      if (!point_strictly_inside(outer, p, kGeomTol))
        fail(Errc::HoleOutsideOuter, "hole " + std::to_string(l + 1) + " reaches the outer boundary");
    for (size_t m = 1; m < l; ++m) {
      const auto& other = spec.polygons[m].pts;
      for (size_t i = 0; i < spec.polygons[l].pts.size(); ++i) {
        Vec2 a = spec.polygons[l].pts[i];
        Vec2 b = spec.polygons[l].pts[(i + 1) % spec.polygons[l].pts.size()];
        for (size_t j = 0; j < other.size(); ++j)
          if (segments_intersect(a, b, other[j], other[(j + 1) % other.size()], kGeomTol))
            fail(Errc::HoleOutsideOuter,
                 "holes " + std::to_string(m + 1) + " and " + std::to_string(l + 1) + " intersect");
      }
      if (point_in_polygon(other, spec.polygons[l].pts[0], 0.0) ||
          point_in_polygon(spec.polygons[l].pts, other[0], 0.0))
        fail(Errc::HoleOutsideOuter,
             "holes " + std::to_string(m + 1) + " and " + std::to_string(l + 1) + " are nested");
    }
  }

  // Exact side directions: snap atan2/pi to a rational; reject if no rational
  // within tolerance (the domain would not close up under the rotation group).
  for (const auto& poly : spec.polygons) {
    std::vector<Rat> dirs;
    for (int j = 0; j < poly.size(); ++j) {
      Vec2 d = poly.pts[(j + 1) % poly.size()] - poly.pts[j];
      double turns = std::atan2(d.y, d.x) / std::numbers::pi;  // in (-1, 1]
      auto r = rat_from_double(turns, 360, kGeomTol);
      if (!r)
        fail(Errc::IrrationalAngle, "side direction " + std::to_string(turns) +
                                        "*pi is not a small rational multiple of pi");
      dirs.push_back(rat_mod(*r, Rat(2)));
    }
    spec.side_dir.push_back(std::move(dirs));
  }

  // Interior angles (pi-units): with the interior on the left, the angle at
  // vertex j is (incoming direction + 1 - outgoing direction) mod 2.
  Rat total(0);
  for (size_t l = 0; l < spec.polygons.size(); ++l) {
    const auto& dirs = spec.side_dir[l];
    int n = spec.polygons[l].size();
    std::vector<Rat> angles;
    int64_t poly_lcm = 1;
    for (int j = 0; j < n; ++j) {
      Rat incoming = dirs[(j - 1 + n) % n];
      Rat gamma = rat_mod(incoming + Rat(1) - dirs[j], Rat(2));
      if (gamma.is_zero())
        fail(Errc::NonSimplePolygon,
             "zero interior angle at polygon " + std::to_string(l + 1) + " vertex " + std::to_string(j + 1));
      angles.push_back(gamma);
      poly_lcm = lcm64(poly_lcm, gamma.den);
      total += gamma;
    }
    spec.angle.push_back(std::move(angles));
    spec.polygon_C.push_back(poly_lcm);
  }
  spec.angle_sum = total;

  // Closure: sum of interior angles of a k-holed polygon with n_total sides
  // equals (n_total + 2k - 4) * pi exactly.
  int64_t k = static_cast<int64_t>(spec.polygons.size());
  Rat expected(spec.total_sides() + 2 * k - 4);
  if (!(total == expected))
    fail(Errc::AngleSumViolation,
         "interior angles sum to " + to_string(total) + " pi, expected " + to_string(expected));

  // Global rotation order: lcm of the denominators of all side-direction
  // differences (pi-units mod 1) against the first outer side.
  Rat ref = spec.side_dir[0][0];
  int64_t C = 1;
  for (size_t l = 0; l < spec.polygons.size(); ++l)
    for (const Rat& d : spec.side_dir[l]) {
      Rat diff = rat_mod(d - ref, Rat(1));
      C = lcm64(C, diff.den);
    }
  spec.C = C;
  return spec;
}

// ---------------------------------------------------------------------------
// Isometry
// ---------------------------------------------------------------------------

std::optional<std::pair<Q3, Q3>> Isometry::exact_cos_sin() const {
  return exact_cos_sin_pi(Rat(2 * k, C));
}

Vec2 Isometry::linear(Vec2 v) const {
  double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(C);
  double c = std::cos(ang), s = std::sin(ang);
  if (auto exact = exact_cos_sin()) {
    c = exact->first.value();
    s = exact->second.value();
  }
  if (!odd) return {c * v.x - s * v.y, s * v.x + c * v.y};
  return {c * v.x + s * v.y, s * v.x - c * v.y};
}

Vec2 Isometry::linear_transposed(Vec2 v) const {
  if (odd) return linear(v);  // reflection matrices are symmetric
  double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(C);
  double c = std::cos(ang), s = std::sin(ang);
  if (auto exact = exact_cos_sin()) {
    c = exact->first.value();
    s = exact->second.value();
  }
  return {c * v.x + s * v.y, -s * v.x + c * v.y};
}

SymPoint linear_apply_sym(const Isometry& iso, const SymPoint& p, const Basis& basis) {
  auto exact = iso.exact_cos_sin();
  if (!exact || !p.x.exact || !p.y.exact) {
    Vec2 v = iso.linear({p.x.value, p.y.value});
    return {SymbolicCoord::inexact(v.x), SymbolicCoord::inexact(v.y)};
  }
  const Q3& c = exact->first;
  const Q3& s = exact->second;
  SymbolicCoord cx = sym_scale_q3(p.x, c, basis);
  SymbolicCoord sx = sym_scale_q3(p.x, s, basis);
  SymbolicCoord cy = sym_scale_q3(p.y, c, basis);
  SymbolicCoord sy = sym_scale_q3(p.y, s, basis);
  SymPoint out;
  if (!iso.odd) {
    out.x = sym_sub(cx, sy);
    out.y = sym_add(sx, cy);
  } else {
    out.x = sym_add(cx, sy);
    out.y = sym_sub(sx, cy);
  }
  return out;
}

SymPoint Isometry::apply_sym(const SymPoint& p, const Basis& basis) const {
  SymPoint lin = linear_apply_sym(*this, p, basis);
  if (!t_exact) {
    Vec2 v{lin.x.value + t.x, lin.y.value + t.y};
    return {SymbolicCoord::inexact(v.x), SymbolicCoord::inexact(v.y)};
  }
  return {sym_add(lin.x, t_sym.x), sym_add(lin.y, t_sym.y)};
}

}  // namespace billiard
