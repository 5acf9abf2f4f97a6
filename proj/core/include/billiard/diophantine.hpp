#pragma once

#include <cstdint>
#include <vector>

#include "billiard/rational.hpp"
#include "billiard/symbolic.hpp"

namespace billiard {

// ---------------------------------------------------------------------------
// Simultaneous rational approximation with certified error bounds.
//
// For a tuple alpha_1..alpha_p and a quality parameter N, there is an integer
// Z <= N with |Z*alpha_k - Z_k| <= N^(-1/p) for the nearest integers Z_k
// (pigeonhole). dirichlet_approx returns the smallest such Z by exhaustive
// scan; boundary cases are accepted with <= and a 1e-14 float slack.
// ---------------------------------------------------------------------------

struct DirichletResult {
  int64_t Z = 1;
  std::vector<int64_t> numerators;  // nearest integers Z_k (ties away from zero)
  double bound = 0.0;               // per-value bound N^(-1/p) / Z on |alpha_k - Z_k/Z|
  std::vector<double> errors;       // achieved |alpha_k - Z_k/Z|
  int64_t N = 1;
};

// Smallest admissible denominator Z <= N for the tuple. EmptyInput if the
// tuple is empty; BadParameters if N < 1.
DirichletResult dirichlet_approx(const std::vector<double>& alphas, int64_t N);

// All admissible Z in [1, N], ascending.
std::vector<int64_t> all_admissible_Z(const std::vector<double>& alphas, int64_t N);

// ---------------------------------------------------------------------------
// Angle rationalization with exact closure
// ---------------------------------------------------------------------------

// Result of rationalizing interior angles: every angle becomes an exact
// rational (pi-units); all but the distinguished one are Z_k/Z from one
// simultaneous approximation, and the distinguished angle absorbs the closure
// defect so the angle sum is exactly (total sides + 2k - 4).
struct RationalizedAngles {
  std::vector<Rat> angles;
  int64_t Z = 1;
  int distinguished_index = 0;        // always the last input angle
  double per_angle_bound = 0.0;       // N^(-1/(S-1)) / Z, S = total angle count
  double distinguished_bound = 0.0;   // reported bound (S-1) / (Z * N^(1/(S+k-2)))
  double distinguished_bound_strict = 0.0;  // (S-1) * N^(-1/(S-1)) / Z (<= reported)
};

// Rationalizes interior angles (pi-units) of a k-polygon system whose sizes
// are polygon_sizes. The input sum must be within 1e-9 of the closure
// constant; ClosureViolation otherwise (also if the distinguished angle falls
// outside (0, 2)).
RationalizedAngles rationalize_angles(const std::vector<double>& angles_pi,
                                      const std::vector<int>& polygon_sizes, int64_t N);

// ---------------------------------------------------------------------------
// Period-coefficient rationalization
// ---------------------------------------------------------------------------

// One direction's certified approximation: the distinct basis atoms that
// appear in the coefficients, the common denominator C clearing every
// rational, and the Dirichlet denominator Z for the atom values.
struct DirectionRationalization {
  std::vector<int> atom_indices;    // atoms entering this direction
  int64_t C = 1;                    // lcm of rational-part/coefficient denominators
  int64_t Z = 1;                    // Dirichlet denominator for the atom values
  std::vector<int64_t> numerators;  // nearest integers Z * value_i
  double bound = 0.0;               // N^(-1/mu) with mu = atom count (0 if exact)
  int64_t quantizer() const { return C * Z; }  // the integer entering quantization
};

struct PeriodRationalization {
  DirectionRationalization x, y;
  int64_t N = 1;
};

// Rationalizes the (xi, eta) decompositions of periods over the shared basis.
// Every coordinate must be exact (symbolic); MixedBasis otherwise.
PeriodRationalization rationalize_period_coefficients(
    const std::vector<std::pair<SymbolicCoord, SymbolicCoord>>& xi_eta, const Basis& basis,
    int64_t N);

// Rationalizes one coordinate list with a shared denominator pair: C clears
// every rational in every coordinate, Z approximates the atoms that appear.
// MixedBasis if a coordinate is not exact over the basis.
DirectionRationalization rationalize_coordinates(const std::vector<SymbolicCoord>& coords,
                                                 const Basis& basis, int64_t N);

// Certificate constant for one coordinate: sum over its atoms of C*|coeff|.
// |C*Z*value - nearest integer| <= certificate * N^(-1/mu).
double coefficient_certificate(const SymbolicCoord& coord, const DirectionRationalization& dir);

}  // namespace billiard
