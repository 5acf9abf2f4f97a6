#pragma once

#include <string>
#include <utility>
#include <vector>

#include "billiard/rational.hpp"

namespace billiard {

// ---------------------------------------------------------------------------
// Symbolic coordinates: exact rational combinations over a basis of named
// real "atoms" (e.g. hole offsets, sqrt(3)-scaled lengths), with a cached
// numeric value. Atoms may be linked in sqrt(3) pairs so that multiplying a
// coordinate by sqrt(3) stays exact; anything outside the closure degrades
// gracefully to a numeric-only coordinate (exact = false).
// ---------------------------------------------------------------------------

// Sentinel partner index: sqrt(3) * atom lands in the rational part.
inline constexpr int kRationalUnit = -2;
inline constexpr int kNoPartner = -1;

// One basis element: a named real value, optionally linked so that
// sqrt(3) * value == sqrt3_factor * (partner atom's value, or 1 if kRationalUnit).
struct BasisAtom {
  std::string name;
  double value = 0.0;
  int sqrt3_partner = kNoPartner;
  Rat sqrt3_factor = Rat(0);
};

// Ordered atom collection shared by every symbolic coordinate of a billiard.
struct Basis {
  std::vector<BasisAtom> atoms;
  int sqrt3_index = kNoPartner;  // atom whose value is sqrt(3) itself, if any

  int find(const std::string& name) const;
  // Returns the atom index for `name`, inserting it with `value` if missing.
  int find_or_add(const std::string& name, double value);
  // Detects value-level sqrt(3) relations between atoms (and the rational
  // unit) and links them as partners. Idempotent.
  void auto_link(double rel_tol = 1e-12);

  size_t size() const { return atoms.size(); }
};

// Exact coordinate: rational part + rational coefficients over basis atoms.
// `value` caches the numeric evaluation; `exact` marks whether the symbolic
// expansion is authoritative (false = numeric-only fallback).
struct SymbolicCoord {
  Rat rat;
  std::vector<std::pair<int, Rat>> terms;  // sorted by atom index, no zeros
  double value = 0.0;
  bool exact = true;

  SymbolicCoord() = default;
  explicit SymbolicCoord(Rat r) : rat(r), value(r.value()) {}

  static SymbolicCoord rational(Rat r) { return SymbolicCoord(r); }
  static SymbolicCoord atom(int index, double atom_value, Rat coeff = Rat(1));
  static SymbolicCoord inexact(double v);

  bool is_rational() const { return exact && terms.empty(); }
  void normalize();
};

// Recomputes the coordinate's value from the basis; raises UnknownBasisIndex
// if a term references a missing atom.
double evaluate_symbolic(const SymbolicCoord& c, const Basis& basis);

SymbolicCoord sym_add(const SymbolicCoord& a, const SymbolicCoord& b);
SymbolicCoord sym_sub(const SymbolicCoord& a, const SymbolicCoord& b);
SymbolicCoord sym_neg(const SymbolicCoord& a);
SymbolicCoord sym_scale(const SymbolicCoord& a, const Rat& s);

// sqrt(3) * a, exact only when every involved atom has a sqrt(3) partner.
SymbolicCoord sym_mul_sqrt3(const SymbolicCoord& a, const Basis& basis);

// Gives every atom a sqrt(3) companion (a new atom, or a rational-part link
// when sqrt(3)*value is rational) and links the basis. Afterwards
// sym_mul_sqrt3 is exact on every combination over the basis.
void ensure_sqrt3_closure(Basis& basis);

// (s.a + s.b*sqrt(3)) * a via the partner links.
SymbolicCoord sym_scale_q3(const SymbolicCoord& a, const Q3& s, const Basis& basis);

// Exact equality of the symbolic expansions (requires both exact).
bool sym_equal(const SymbolicCoord& a, const SymbolicCoord& b);

// 2D point with symbolic coordinates.
struct SymPoint {
  SymbolicCoord x, y;
};

inline SymPoint sym_point(SymbolicCoord px, SymbolicCoord py) {
  return SymPoint{std::move(px), std::move(py)};
}

}  // namespace billiard
