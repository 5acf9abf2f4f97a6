#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "billiard/geometry.hpp"

namespace billiard {

// ---------------------------------------------------------------------------
// Ray dynamics in billiards whose boundary mixes straight polygon sides with
// circular holes: tracing, periodic-orbit search, and replacement of each
// circle by a tangent-line envelope polygon built from orbit data.
// ---------------------------------------------------------------------------

// Circular hole (scatterer) strictly inside the outer polygon.
struct Circle {
  Vec2 center{};
  double radius = 0.0;
};

// Billiard domain: inside `outer`, outside every circle.
struct CurvedBilliard {
  std::vector<Vec2> outer;      // counterclockwise simple polygon
  std::vector<Circle> circles;

  int sides() const { return static_cast<int>(outer.size()); }
  int surfaces() const { return sides() + static_cast<int>(circles.size()); }
  bool is_circle_surface(int id) const { return id >= sides(); }
  const Circle& circle_of(int id) const { return circles[id - sides()]; }
  // Endpoints of polygon side `id` (from vertex id to the next one).
  std::pair<Vec2, Vec2> side(int id) const;
};

// Validates the domain: simple CCW outer polygon, positive radii, circles
// strictly inside and pairwise disjoint. Raises NonSimplePolygon,
// HoleOutsideOuter, or BadParameters.
CurvedBilliard make_curved(std::vector<Vec2> outer, std::vector<Circle> circles);

// Closed-domain membership with `tol` slack (negative tol = required clearance).
bool curved_contains(const CurvedBilliard& cb, Vec2 p, double tol = kGeomTol);

// Polyline traced by a point particle with specular reflections.
struct TraceResult {
  std::vector<Vec2> points;    // launch point plus every bounce point
  std::vector<int> surfaces;   // surface id of each bounce
  bool corner_hit = false;     // stopped within corner tolerance of a vertex
  bool tangent_hit = false;    // stopped on a grazing circle contact
};

// Traces from a strictly interior start along `direction` for at most
// `max_bounces` reflections. Raises BadParameters for an outside start, a
// zero direction, or a non-positive bounce budget.
TraceResult trace(const CurvedBilliard& cb, Vec2 start, Vec2 direction, int max_bounces);

enum class StabilityTag { isolated, family };

// Closed periodic orbit: bounce points in cyclic order.
struct Orbit {
  std::vector<Vec2> points;
  std::vector<int> surfaces;   // surface id of each bounce
  double length = 0.0;
  StabilityTag tag = StabilityTag::isolated;
  bool hits_circle = false;
};

// Finds distinct periodic orbits with at most `max_bounces` (<= 8) bounces
// and length at most `max_length`, sorted by (length, surface sequence).
// Orbits equal up to cyclic shift or reversal are reported once. An empty
// result means none were found; invalid budgets raise BadParameters.
std::vector<Orbit> find_periodic_orbits(const CurvedBilliard& cb, int max_bounces,
                                        double max_length);

// Convex polygon circumscribing `circle` whose sides are tangent at the given
// angular positions (radians, >= 3 distinct). Vertices are consecutive tangent
// intersections, counterclockwise. Raises BadParameters for fewer than three
// distinct positions and AdjacentGapTooWide when a sorted angular gap
// reaches pi (the tangents would stop intersecting on the proper side).
std::vector<Vec2> envelope_from_angles(const Circle& circle, std::vector<double> angles);

// Same, with tangency positions given as points on the circle.
std::vector<Vec2> envelope_polygon(const Circle& circle, const std::vector<Vec2>& points);

// Result of replacing the circles of a curved billiard by envelope polygons.
struct ApproximationResult {
  BilliardSpec spec;                        // polygon-with-holes billiard
  std::vector<std::vector<double>> tangent_angles;  // cluster means per circle
  std::pair<double, double> beta_arc{0.0, 0.0};     // widest tangency-free arc
  double beta_gap = 0.0;                    // its angular width
  bool snapped_exact = true;                // directions landed on exact rationals
  int64_t angle_Z = 1;                      // shared denominator when approximated
  double angle_bound = 0.0;                 // certified direction error (0 if exact)
};

// Builds a polygonal stand-in for every circular hole from the tangency
// points of the `orbit_budget` shortest circle-hitting periodic orbits.
// Tangency directions within 2*pi/100 are merged; the resulting side
// directions are made rational exactly when possible, otherwise through a
// certified simultaneous approximation. Raises BadParameters (budget < 3 or
// no circles) and NoneFound when too few circle-hitting orbits exist.
ApproximationResult approximate_billiard(const CurvedBilliard& cb, int orbit_budget,
                                         int max_bounces = 6);

}  // namespace billiard
