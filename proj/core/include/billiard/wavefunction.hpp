#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "billiard/diophantine.hpp"
#include "billiard/epp.hpp"
#include "billiard/spectrum.hpp"

namespace billiard {

// ---------------------------------------------------------------------------
// Wavefunctions on the unfolded pattern: the interference sum of one plane
// wave per cell, its closed forms for the built-in families, certified
// boundary/nodal-line residual bounds, and grid sampling.
//
// All momenta are construction-frame vectors (the frame of Epp::to_internal);
// evaluation points are given in the original billiard coordinates.
// ---------------------------------------------------------------------------

// One plane-wave term coeff * exp(i k . x) in construction-frame coordinates.
struct PlaneWave {
  Vec2 k{};
  std::complex<double> coeff{1.0, 0.0};
};

// Interference sum over all cell images of the point. PointOutside if the
// point is not in the closed billiard domain.
std::complex<double> evaluate(const Epp& epp, const QuantumState& state, Vec2 point);

// The same wavefunction as 2C plane waves with cell-transposed momenta.
std::vector<PlaneWave> direction_waves(const Epp& epp, const QuantumState& state);

// Evaluates the plane-wave form; agrees with evaluate up to rounding.
std::complex<double> evaluate_directions(const Epp& epp, const QuantumState& state, Vec2 point);

// ---------------------------------------------------------------------------
// Closed forms for the built-in families
// ---------------------------------------------------------------------------

enum class ClosedFormFamily {
  RectangularHoles,  // axis-aligned rectangle with axis-aligned holes
  RotatedHoles,      // rectangle with pi/4-rotated holes
  SinaiTriangle,     // right triangle with the dodecagonal hole
};

// Geometry/denominator data a closed form needs beyond the quantum numbers.
struct ClosedFormSpec {
  ClosedFormFamily family = ClosedFormFamily::RectangularHoles;
  double a = 1.0, b = 1.0;  // outer rectangle sides
  int64_t zx = 1, zy = 1;   // per-direction approximation denominators
  int64_t z = 1;            // shared denominator (triangle family)
  double h_off = 0.0, w_off = 0.0;  // phase offsets (rotated-hole family)
};

// Product form sin(pi m zx x / a) sin(pi n zy y / b).
double rect_closed_form(double a, double b, int64_t zx, int64_t zy, int64_t m, int64_t n,
                        Vec2 pt);

// Difference of the two axis product forms with the offset-dependent phase
// on the swapped term (square outer boundary, a = b).
std::complex<double> rotated_closed_form(double a, double b, int64_t zx, int64_t zy, int64_t m,
                                         int64_t n, double h_off, double w_off, Vec2 pt);

// Three-term product form in mixed coordinates (vanishes exactly on x = 1,
// y = 0 and y = sqrt(3) x).
double sinai_closed_form(int64_t z, int64_t m, int64_t n, Vec2 pt);

// The same function expanded into axis-separated sine products.
double sinai_closed_form_axes(int64_t z, int64_t m, int64_t n, Vec2 pt);

// Dispatches on form.family; UnknownFamily for an invalid tag.
std::complex<double> closed_form(const ClosedFormSpec& form, int64_t m, int64_t n, Vec2 pt);

// ---------------------------------------------------------------------------
// Residual reports: measured boundary values against certified bounds
// ---------------------------------------------------------------------------

// Measured-versus-certified comparison of |Psi| along one side or line.
// The certified bound is 2*pi*(|m| * i1 * n1^(-1/mu1) + |n| * i2 * n2^(-1/mu2))
// plus 2 per twin pair outside the sine-cancellation mechanism.
struct ResidualReport {
  std::string label;
  int samples = 0;
  double measured = 0.0;
  double bound = 0.0;
  double i1 = 0.0, i2 = 0.0;  // certificate constants (sums of C*|coeff|)
  int64_t n1 = 1, n2 = 1;     // approximation quality parameters
  double mu1 = 0.0, mu2 = 0.0;  // tuple sizes; 0 marks an exact direction
  int weak_pairs = 0;
};

// Samples |Psi| along the side and assembles the certified bound from the
// decomposed coefficients of the side's twin periods. The state quantizers
// must be multiples of the rationalization quantizers. SideNotFound for a
// bad id; BadParameters if the periods are not decomposed or not covered.
ResidualReport boundary_residual(const Epp& epp, const QuantumState& state,
                                 const PeriodRationalization& rat, SideId side,
                                 int samples = 1024);

// Family bound on hole-side values of the rectangular-hole product form:
// pi * |quantum| * N^(-1/(2*hole_count)).
double rect_hole_side_bound(int64_t quantum, int64_t hole_count, int64_t N);

// Family bound on the tangent-side values of the triangle form:
// 6*pi*(|m| + |n| + |m - n|) * N^(-1/4).
double sinai_side_bound(int64_t m, int64_t n, int64_t N);

// Certified pointwise bound on the change of Psi when one cell is reglued
// across a twin side whose displacement decomposes with these coefficients.
double reglue_bound(const std::pair<SymbolicCoord, SymbolicCoord>& coeffs,
                    const PeriodRationalization& rat, const QuantumState& state);

// ---------------------------------------------------------------------------
// Sine-product reduction (single-sector patterns with even rotation order)
// ---------------------------------------------------------------------------

// One row amp * sin(kx * x) * sin(ky * y) in pair-aligned coordinates.
struct SineProduct {
  double kx = 0.0, ky = 0.0;
  double amp = 0.0;
};

// The wavefunction reduced to C/2 sine-product rows in the rotated frame
// whose x-axis is aligned with the first direction of the chosen pair.
struct SineProductForm {
  Rat frame_angle;  // direction of the pair x-axis, pi-units
  double cphi = 1.0, sphi = 0.0;
  std::vector<SineProduct> rows;

  Vec2 to_pair_frame(Vec2 internal_pt) const {
    return {cphi * internal_pt.x + sphi * internal_pt.y,
            -sphi * internal_pt.x + cphi * internal_pt.y};
  }
  double value_pair(Vec2 pair_pt) const;
  double value_internal(Vec2 internal_pt) const { return value_pair(to_pair_frame(internal_pt)); }
};

// Groups the 2C plane waves into sine products. Requires a single-sector
// pattern with even C, a chosen direction pair aligned with the rotation
// grid, and the four-fold momentum symmetry; SymmetryAbsent otherwise.
SineProductForm sine_product_reduction(const Epp& epp, const QuantumState& state);

// ---------------------------------------------------------------------------
// Singular diagonals: approximate nodal lines of transverse-mode states
// ---------------------------------------------------------------------------

// One candidate nodal line in pair-frame coordinates: axis 'x' is the
// vertical line x = value, axis 'y' the horizontal one.
struct SingularLine {
  char axis = 'x';
  double value = 0.0;
  SymbolicCoord value_sym;
};

struct SdReport {
  QuantumState state;                 // transverse-mode state built here
  SineProductForm form;               // reduced evaluator for that state
  DirectionRationalization cor, run;  // transverse (m) and running (n) data
  int64_t N = 1;
  std::vector<SingularLine> lines;
  std::vector<ResidualReport> reports;  // one per line
};

// Builds the transverse-mode state on the chosen orthogonal direction pair
// with denominators certified against every line through a cell image of a
// vertex, then measures |Psi| along each such line inside the billiard.
// PeriodsNotOrthogonal if the pair is not orthogonal; SymmetryAbsent and
// MixedBasis propagate from the reduction and the exact bookkeeping.
SdReport singular_diagonals(const Epp& epp, int64_t m, int64_t n, int64_t N, int samples = 1024);

// ---------------------------------------------------------------------------
// Grid sampling
// ---------------------------------------------------------------------------

// Complex field sampled on a uniform grid over the outer bounding box.
struct ScalarField {
  double x0 = 0.0, y0 = 0.0;
  double dx = 0.0, dy = 0.0;
  int nx = 0, ny = 0;
  std::vector<std::complex<double>> values;  // row-major, index = iy*nx + ix
  std::vector<uint8_t> mask;                 // 1 where the sample is in the domain
  int64_t m = 0, n = 0;
  double energy = 0.0;

  std::complex<double> at(int ix, int iy) const {
    return values[static_cast<size_t>(iy) * static_cast<size_t>(nx) + static_cast<size_t>(ix)];
  }
  Vec2 point(int ix, int iy) const { return {x0 + ix * dx, y0 + iy * dy}; }
};

// Samples the wavefunction on an nx-by-ny grid (endpoints included).
// BadResolution unless both sizes are at least 2.
ScalarField grid_field(const Epp& epp, const QuantumState& state, int nx, int ny);

}  // namespace billiard
