#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "billiard/rational.hpp"
#include "billiard/symbolic.hpp"

namespace billiard {

// Default tolerance for all numeric geometry predicates.
inline constexpr double kGeomTol = 1e-9;

// ---------------------------------------------------------------------------
// Numeric 2D vectors
// ---------------------------------------------------------------------------

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
  Vec2 operator-() const { return {-x, -y}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }
double norm(Vec2 a);
double dist(Vec2 a, Vec2 b);

// ---------------------------------------------------------------------------
// Exact angles (rational multiples of pi)
// ---------------------------------------------------------------------------

// Angle stored as an exact rational in units of pi.
struct RationalAngle {
  Rat pi_units;
  double radians() const;
};

// Reflects p across the line through a and b. DegenerateLine if a == b.
Vec2 reflect(Vec2 p, Vec2 a, Vec2 b);

// Rotates p about center by an exact rational angle (pi-units).
Vec2 rotate(Vec2 p, Vec2 center, const Rat& angle_pi_units);

// ---------------------------------------------------------------------------
// Validated billiard domain
// ---------------------------------------------------------------------------

// Polygon with symbolic vertices plus cached numeric positions.
// The outer polygon is stored counterclockwise, holes clockwise, so that the
// billiard interior always lies to the left of the traversal.
struct Polygon {
  std::vector<SymPoint> vertices;
  std::vector<Vec2> pts;  // numeric copies, same indexing
  bool is_hole = false;

  int size() const { return static_cast<int>(pts.size()); }
};

struct VertexId {
  int polygon = 0;
  int vertex = 0;
  friend bool operator==(const VertexId&, const VertexId&) = default;
};

struct SideId {
  int polygon = 0;
  int side = 0;  // side i runs from vertex i to vertex i+1 (cyclic)
  friend bool operator==(const SideId&, const SideId&) = default;
};

// A multiply connected rational polygon domain with everything the
// construction downstream needs: exact side directions, exact interior
// angles, and the global rotation order C.
struct BilliardSpec {
  Basis basis;
  std::vector<Polygon> polygons;           // [0] = outer, rest = holes
  std::vector<std::vector<Rat>> side_dir;  // oriented side direction, pi-units in [0,2)
  std::vector<std::vector<Rat>> angle;     // interior angle at each vertex, pi-units in (0,2)
  int64_t C = 1;                           // lcm of side-direction-difference denominators
  std::vector<int64_t> polygon_C;          // per-polygon lcm of angle denominators
  Rat angle_sum;                           // exact sum of all interior angles (pi-units)

  int total_sides() const;
  Vec2 vertex_pt(VertexId v) const { return polygons[v.polygon].pts[v.vertex]; }
  const SymPoint& vertex_sym(VertexId v) const { return polygons[v.polygon].vertices[v.vertex]; }
  Vec2 side_a(SideId s) const { return polygons[s.polygon].pts[s.side]; }
  Vec2 side_b(SideId s) const {
    const auto& poly = polygons[s.polygon];
    return poly.pts[(s.side + 1) % poly.size()];
  }
  // Direction of side s reduced mod 1 (undirected line direction).
  Rat line_dir(SideId s) const { return rat_mod(side_dir[s.polygon][s.side], Rat(1)); }
};

// Builds and fully validates a billiard domain from symbolic polygons.
// polygons[0] is the outer boundary; the rest are holes. Orientations are
// normalized internally. Raises NonSimplePolygon, HoleOutsideOuter,
// IrrationalAngle, or AngleSumViolation on invalid input.
BilliardSpec make_billiard(Basis basis, std::vector<std::vector<SymPoint>> polygons);

// True if p lies in the closed billiard domain (inside outer, outside holes),
// with `tol` slack on every boundary.
bool point_in_domain(const BilliardSpec& spec, Vec2 p, double tol = kGeomTol);

// Signed distance-free membership for a single polygon (closed, tol slack).
bool point_in_polygon(const std::vector<Vec2>& poly, Vec2 p, double tol = kGeomTol);

// ---------------------------------------------------------------------------
// Isometries of the construction group
// ---------------------------------------------------------------------------

// Element of the dihedral-like group used by the cell construction:
// linear part = rotation by 2*pi*k/C (even) or the reflection whose matrix
// entries are cos/sin of the same angle (axis at pi*k/C), plus a translation.
struct Isometry {
  int64_t k = 0;
  int64_t C = 1;
  bool odd = false;
  Vec2 t{};
  SymPoint t_sym{};
  bool t_exact = true;

  Vec2 linear(Vec2 v) const;
  Vec2 apply(Vec2 v) const { return linear(v) + t; }
  // Transposed linear part applied to a vector (used for momenta).
  Vec2 linear_transposed(Vec2 v) const;

  // Exact linear part as Q3 matrix entries (cos, sin), when representable.
  std::optional<std::pair<Q3, Q3>> exact_cos_sin() const;

  // Applies the isometry to a symbolic point; degrades to numeric-only
  // coordinates when the rotation is not exactly representable.
  SymPoint apply_sym(const SymPoint& p, const Basis& basis) const;
};

// Applies just the linear part symbolically.
SymPoint linear_apply_sym(const Isometry& iso, const SymPoint& p, const Basis& basis);

}  // namespace billiard
