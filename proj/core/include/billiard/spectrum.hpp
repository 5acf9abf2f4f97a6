#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "billiard/epp.hpp"

namespace billiard {

// ---------------------------------------------------------------------------
// Semiclassical quantization on a period pair (D1, D2) with quantizers
// Z1, Z2: momenta solve p . D1 = 2*pi*m*Z1, p . D2 = 2*pi*n*Z2, and the
// energy is |p|^2/2. Periodic skeletons additionally split the momentum into
// a running component along the skeleton and a small bound correction.
// ---------------------------------------------------------------------------

enum class SkeletonKind { aperiodic, periodic };

struct QuantumState {
  int64_t m = 0, n = 0;
  int64_t Z1 = 1, Z2 = 1;
  Vec2 p{};
  double energy = 0.0;
  SkeletonKind kind = SkeletonKind::aperiodic;

  // Periodic-kind extras.
  int sigma = 0;                            // branch sign of the bound correction
  double e0 = 0.0;                          // bound-correction energy
  std::pair<int64_t, int64_t> kl{0, 0};     // coprime solution of the y-ratio condition
  std::pair<int64_t, int64_t> rs{0, 0};     // coprime solution of the x-ratio condition
  bool condition_f_ok = true;               // e0 <= eps * energy
};

// Solves the two dot-product conditions exactly (2x2 linear system).
// DegeneratePeriods when D1, D2 are dependent; ZeroQuantumNumber when m or n
// vanishes (zero is admitted only on periodic skeletons).
QuantumState quantize_aperiodic(Vec2 d1, Vec2 d2, int64_t z1, int64_t z2, int64_t m, int64_t n);

// Closed-form energy of the same state, evaluated independently of the solve:
// 2*pi^2 (m^2 Z1^2 |D2|^2 - 2 m n Z1 Z2 D1.D2 + n^2 Z2^2 |D1|^2) / |D1 x D2|^2.
double closed_form_energy(Vec2 d1, Vec2 d2, int64_t z1, int64_t z2, int64_t m, int64_t n);

// Orthogonal-pair shortcut 2*pi^2 (m^2 Z1^2/|D1|^2 + n^2 Z2^2/|D2|^2);
// PeriodsNotOrthogonal when D1 . D2 does not vanish.
double orthogonal_energy(Vec2 d1, Vec2 d2, int64_t z1, int64_t z2, int64_t m, int64_t n);

// Quantizes a periodic skeleton: reads the coprime pairs (k,l) and (r,s)
// off the exact component ratios, builds the running momentum and the two
// bound-correction branches, and checks e0 <= eps * E (violations only flag
// the state). NoCoprimeSolution when a required ratio is irrational.
std::pair<QuantumState, QuantumState> quantize_periodic(const PureVec& d1, const PureVec& d2,
                                                        int64_t z1, int64_t z2, int64_t m,
                                                        int64_t n, double eps = 0.1);

// Wavelength unit of one axis: lambda = period_length / (|quantum number| * Z).
struct WavelengthUnit {
  char direction = 'x';
  double lambda = 0.0;
};
WavelengthUnit wavelength(const QuantumState& state, double period_length, char direction);

// Nearest whole number of lambda units in L, plus the leftover distance.
std::pair<int64_t, double> measure_length(double length, double lambda);

// Periodic when the direction is parallel (within tol radians) to some
// period; returns the shortest matching period, or nothing when aperiodic.
std::optional<Period> classify_skeleton(Vec2 direction, const std::vector<Period>& periods,
                                        double tol = 1e-9);

// All aperiodic states with 1 <= |m|, |n| <= range, sorted by (E, m, n).
std::vector<QuantumState> generate_spectrum(Vec2 d1, Vec2 d2, int64_t z1, int64_t z2,
                                            int64_t range);

}  // namespace billiard
