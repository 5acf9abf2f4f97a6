#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "billiard/geometry.hpp"

namespace billiard {

// ---------------------------------------------------------------------------
// Elementary periodic pattern: 2C isometric copies of the billiard arranged
// around a base vertex (fan of rotations and reflections, sectors chained by
// gluing translations), with every boundary side identified to a parallel
// twin by a translation. The fan and chain identifications are gluing arcs;
// every remaining pairing is a period (whose translation can coincidentally
// vanish in symmetric geometry).
// ---------------------------------------------------------------------------

// Affine map from the original billiard frame to the construction frame
// (base vertex at the origin, first outgoing side along +x).
struct FrameMap {
  Rat rot;  // rotation angle in pi-units
  Vec2 shift{};
  SymPoint shift_sym{};
  bool exact = true;

  Vec2 apply_linear(Vec2 v) const;
  Vec2 apply(Vec2 p) const { return apply_linear(p) + shift; }
  SymPoint apply_sym(const SymPoint& p, const Basis& basis) const;
};

// One copy of the billiard in the pattern. Even cells are rotations by
// 2*pi*j/C, odd cells are reflections with axis pi*j/C, both shifted by
// their sector's gluing translation.
struct EppCell {
  int64_t j = 0;    // rotation slot, 0..C-1
  int64_t r = 1;    // fan label within the sector, 1..q
  int64_t u = 1;    // sector label, 1..m
  bool odd = false;
  Isometry iso;     // includes the sector translation
};

// Identification of the even copy of a side with its parallel odd twin:
// odd_image(x) = even_image(x) + period for every x on the side.
struct Pairing {
  SideId side;
  int even_cell = 0;  // index into Epp::cells
  int odd_cell = 0;
  int64_t delta = 0;  // sector shift class of the side's direction
  Vec2 period{};
  SymPoint period_sym{};
  bool period_exact = true;
  bool is_zero = false;  // gluing arc (fan or sector chain), not a period
};

// A nonzero identification vector, optionally decomposed over a chosen
// direction pair D1, D2 as period = xi*D1 + eta*D2 with symbolic xi, eta.
struct Period {
  Vec2 v{};
  SymPoint sym{};
  bool exact = true;
  int pairing = 0;  // index into Epp::pairings
  SideId side;
  int64_t sector_from = 1, sector_to = 1;
  std::optional<std::pair<SymbolicCoord, SymbolicCoord>> coeffs;
};

// Direction vector with exact a + b*sqrt(3) components (the form every
// family's quantization pair takes).
struct PureVec {
  Q3 x, y;
  Vec2 value() const { return {x.value(), y.value()}; }
};

struct Epp {
  BilliardSpec spec;  // original billiard (original coordinates)
  VertexId base;
  int64_t C = 1;        // rotation order
  int64_t q = 1;        // base-vertex angle denominator
  int64_t p_prime = 1;  // base-vertex angle numerator (reduced)
  int64_t m = 1;        // sector count C/q
  FrameMap frame;       // original -> construction frame

  // Billiard geometry transported to the construction frame.
  std::vector<std::vector<SymPoint>> internal_vertices;
  std::vector<std::vector<Vec2>> internal_pts;
  std::vector<std::vector<Rat>> internal_line_dir;  // side direction mod 1 (pi-units)

  std::vector<EppCell> cells;  // size 2C: [j] = even slot j, [C+j] = odd slot j
  std::vector<Vec2> sector_R;  // gluing translations, 1-based (sector_R[1] = 0)
  std::vector<SymPoint> sector_R_sym;
  bool sector_exact = true;

  std::vector<Pairing> pairings;
  std::vector<Period> periods;  // the non-gluing pairings, in pairing order
  SideId gluing_side{-1, -1};
  int64_t gluing_delta = 0;
  // Sector-chain gluing arcs as {polygon, side, even slot}: the m-1 pairings
  // the sector translations were solved to close.
  std::vector<std::array<int, 3>> chain_arcs;

  std::optional<std::pair<PureVec, PureVec>> d_pair;  // set by decompose_periods

  int even_index(int64_t j) const { return static_cast<int>(j); }
  int odd_index(int64_t j) const { return static_cast<int>(C + j); }
  Vec2 to_internal(Vec2 p) const { return frame.apply(p); }
  Vec2 momentum_to_internal(Vec2 p) const { return frame.apply_linear(p); }
};

// Twin displacement of a boundary point (x, y) on a side at angle
// gamma (pi-units) through the origin: the vector from the point to its
// reflected twin image.
Vec2 twin_displacement(Vec2 point, const Rat& gamma_pi_units);

// Base vertex with the largest angle denominator (ties: smallest polygon,
// then vertex index). This maximizes the single-sector fan.
VertexId choose_base_vertex(const BilliardSpec& spec);

// Builds only the base-vertex fan (sector 1): 2q alternating cells closing
// around the base vertex. InvalidVertex for an out-of-range id.
Epp build_sector(const BilliardSpec& spec, VertexId base);

// Builds the full pattern: all m sectors, gluing translations, the complete
// side pairing, and the period list (count C*(total sides - 2) - m + 1).
Epp build_full(const BilliardSpec& spec, VertexId base);

// Exact Euler counts of the identified complex, from the angle data alone:
// E = C*sum(p/q) + 4C, V = C*sum(1/q), S = 4C, genus = (E - V - S + 2)/2.
struct GenusReport {
  Rat E, V, S;
  int64_t genus = 0;
};
GenusReport compute_genus(const BilliardSpec& spec);

// Rank of the period classes in the first homology of the glued surface,
// computed over exact rationals (equals 2*genus when the periods span).
int64_t integer_rank(const Epp& epp);

// Homology bookkeeping exposed for validation: vertex orbits, edge and face
// counts of the cut complex, and the period-class rank.
struct HomologyReport {
  int64_t rank = 0;
  int64_t vertex_orbits = 0;
  int64_t edges = 0;
  int64_t faces = 0;
};
HomologyReport homology_report(const Epp& epp);

// Writes xi/eta coefficients (period = xi*D1 + eta*D2) into every period.
// DegeneratePeriods if D1, D2 are linearly dependent.
void decompose_periods(Epp& epp, const PureVec& d1, const PureVec& d2);

// Shortest period expressible in the a + b*sqrt(3) field plus the shortest
// such period not parallel to it; nothing if fewer than two exist.
std::optional<std::pair<PureVec, PureVec>> suggest_pair(const Epp& epp);

// Moves one cell so that its copy of `side` lands on the twin copy, gluing
// that pairing (period becomes zero) and recomputing every pairing the cell
// participates in. NotBoundaryCell if the cell has no nonzero pairing;
// NotTwinSide if the chosen pairing is already a gluing arc.
Epp reglue(const Epp& epp, int cell_index, SideId side);

}  // namespace billiard
