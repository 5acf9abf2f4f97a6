#include "billiard/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "billiard/parallel.hpp"

namespace billiard {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double checked_cross(Vec2 d1, Vec2 d2) {
  double c = cross(d1, d2);
  if (std::abs(c) < 1e-12 * (1.0 + norm(d1) * norm(d2)))
    fail(Errc::DegeneratePeriods, "period pair is linearly dependent");
  return c;
}

// v rotated a quarter turn clockwise: the planar contraction of v x (D1 x D2)
// before dividing out the cross magnitude.
Vec2 rot_cw(Vec2 v) { return {v.y, -v.x}; }

// Coprime (num, den) with num*B = den*A, i.e. the reduced ratio A/B, covering
// the B = 0 edge exactly; requires the exact ratio to be rational.
std::pair<int64_t, int64_t> coprime_ratio(const Q3& a, const Q3& b, const char* what) {
  if (b.is_zero()) {
    if (a.is_zero()) return {0, 1};  // degenerate: any pair works, pick the canonical one
    return {1, 0};
  }
  Q3 ratio = a / b;
  if (!ratio.is_rational())
    fail(Errc::NoCoprimeSolution, std::string("component ratio for ") + what +
                                      " is irrational; periodic conditions are inconsistent");
  return {ratio.a.num, ratio.a.den};
}

}  // namespace

QuantumState quantize_aperiodic(Vec2 d1, Vec2 d2, int64_t z1, int64_t z2, int64_t m, int64_t n) {
  if (m == 0 || n == 0)
    fail(Errc::ZeroQuantumNumber, "aperiodic skeletons require nonzero quantum numbers");
  double c = checked_cross(d1, d2);
  double rhs1 = kTwoPi * static_cast<double>(m) * static_cast<double>(z1);
  double rhs2 = kTwoPi * static_cast<double>(n) * static_cast<double>(z2);
  QuantumState s;
  s.m = m;
  s.n = n;
  s.Z1 = z1;
  s.Z2 = z2;
  s.kind = SkeletonKind::aperiodic;
  s.p = {(rhs1 * d2.y - rhs2 * d1.y) / c, (rhs2 * d1.x - rhs1 * d2.x) / c};
  s.energy = 0.5 * norm2(s.p);
  return s;
}

double closed_form_energy(Vec2 d1, Vec2 d2, int64_t z1, int64_t z2, int64_t m, int64_t n) {
  double c = checked_cross(d1, d2);
  double mz = static_cast<double>(m) * static_cast<double>(z1);
  double nz = static_cast<double>(n) * static_cast<double>(z2);
  double num = mz * mz * norm2(d2) - 2.0 * mz * nz * dot(d1, d2) + nz * nz * norm2(d1);
  return 2.0 * kPi * kPi * num / (c * c);
}

double orthogonal_energy(Vec2 d1, Vec2 d2, int64_t z1, int64_t z2, int64_t m, int64_t n) {
  if (std::abs(dot(d1, d2)) > 1e-9 * norm(d1) * norm(d2))
    fail(Errc::PeriodsNotOrthogonal, "orthogonal energy form requires perpendicular periods");
  double mz = static_cast<double>(m) * static_cast<double>(z1);
  double nz = static_cast<double>(n) * static_cast<double>(z2);
  return 2.0 * kPi * kPi * (mz * mz / norm2(d1) + nz * nz / norm2(d2));
}

std::pair<QuantumState, QuantumState> quantize_periodic(const PureVec& d1, const PureVec& d2,
                                                        int64_t z1, int64_t z2, int64_t m,
                                                        int64_t n, double eps) {
  Vec2 d1v = d1.value();
  Vec2 d2v = d2.value();
  double c = checked_cross(d1v, d2v);

  // Ratio conditions: k Z1 D2y = l Z2 D1y and r Z1 D2x = s Z2 D1x with
  // coprime integer pairs, read exactly off the symbolic components.
  auto kl = coprime_ratio(Q3(Rat(z2)) * d1.y, Q3(Rat(z1)) * d2.y, "the y components");
  auto rs = coprime_ratio(Q3(Rat(z2)) * d1.x, Q3(Rat(z1)) * d2.x, "the x components");

  // Running momentum along the skeleton and the bound correction across it.
  Vec2 kn = static_cast<double>(kl.first) * static_cast<double>(z1) * d2v -
            static_cast<double>(kl.second) * static_cast<double>(z2) * d1v;
  Vec2 rn = static_cast<double>(rs.first) * static_cast<double>(z1) * d2v -
            static_cast<double>(rs.second) * static_cast<double>(z2) * d1v;
  Vec2 p_run = (kTwoPi * static_cast<double>(n) / c) * rot_cw(kn);
  Vec2 p_cor = (kTwoPi * static_cast<double>(m) / c) * rot_cw(rn);
  double e0 = 0.5 * norm2(p_cor);

  auto make_state = [&](int sigma) {
    QuantumState s;
    s.m = m;
    s.n = n;
    s.Z1 = z1;
    s.Z2 = z2;
    s.kind = SkeletonKind::periodic;
    s.sigma = sigma;
    s.kl = kl;
    s.rs = rs;
    s.p = p_run + static_cast<double>(sigma) * p_cor;
    s.energy = 0.5 * norm2(s.p);
    s.e0 = e0;
    s.condition_f_ok = (e0 <= eps * s.energy) || (e0 == 0.0);
    return s;
  };
  return {make_state(+1), make_state(-1)};
}

WavelengthUnit wavelength(const QuantumState& state, double period_length, char direction) {
  int64_t quantum = (direction == 'x') ? state.m : state.n;
  int64_t z = (direction == 'x') ? state.Z1 : state.Z2;
  if (quantum == 0)
    fail(Errc::ZeroQuantumNumber, "wavelength undefined for a zero quantum number");
  if (period_length <= 0.0) fail(Errc::BadParameters, "period length must be positive");
  WavelengthUnit w;
  w.direction = direction;
  w.lambda = period_length / (static_cast<double>(std::abs(quantum)) * static_cast<double>(z));
  return w;
}

std::pair<int64_t, double> measure_length(double length, double lambda) {
  if (lambda <= 0.0) fail(Errc::BadParameters, "lambda must be positive");
  int64_t count = nearest_int(length / lambda);
  return {count, std::abs(length - static_cast<double>(count) * lambda)};
}

std::optional<Period> classify_skeleton(Vec2 direction, const std::vector<Period>& periods,
                                        double tol) {
  double dn = norm(direction);
  if (dn < 1e-15) fail(Errc::BadParameters, "skeleton direction must be nonzero");
  Vec2 unit = (1.0 / dn) * direction;
  std::optional<Period> best;
  for (const Period& p : periods) {
    double pn = norm(p.v);
    if (pn < 1e-15) continue;
    double sine = std::abs(cross(unit, (1.0 / pn) * p.v));
    if (sine <= tol && (!best || pn < norm(best->v))) best = p;
  }
  return best;
}

std::vector<QuantumState> generate_spectrum(Vec2 d1, Vec2 d2, int64_t z1, int64_t z2,
                                            int64_t range) {
  if (range < 1) fail(Errc::BadParameters, "quantum-number range must be at least 1");
  std::vector<int64_t> ms;
  for (int64_t m = -range; m <= range; ++m)
    if (m != 0) ms.push_back(m);

  std::vector<std::vector<QuantumState>> parts(ms.size());
  parallel_chunks(ms.size(), [&](size_t, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      for (int64_t n = -range; n <= range; ++n) {
        if (n == 0) continue;
        parts[i].push_back(quantize_aperiodic(d1, d2, z1, z2, ms[i], n));
      }
    }
  });

  std::vector<QuantumState> out;
  for (auto& part : parts)
    for (auto& s : part) out.push_back(s);
  std::sort(out.begin(), out.end(), [](const QuantumState& a, const QuantumState& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    if (a.m != b.m) return a.m < b.m;
    return a.n < b.n;
  });
  return out;
}

}  // namespace billiard
