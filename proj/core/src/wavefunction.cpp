#include "billiard/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "billiard/parallel.hpp"

namespace billiard {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt3 = std::numbers::sqrt3;

// Interference sign of a cell: sectors alternate, reflections flip.
double cell_sign(const EppCell& c) {
  double s = (c.u % 2 == 1) ? 1.0 : -1.0;
  return c.odd ? -s : s;
}

std::complex<double> unit_phase(double phase) { return {std::cos(phase), std::sin(phase)}; }

std::complex<double> eval_unchecked(const Epp& epp, Vec2 p, Vec2 internal_pt) {
  std::complex<double> total{0.0, 0.0};
  for (const EppCell& c : epp.cells)
    total += cell_sign(c) * unit_phase(dot(p, c.iso.apply(internal_pt)));
  return total;
}

// Inverse of the construction-frame map.
Vec2 frame_unapply(const FrameMap& f, Vec2 p) {
  double ang = kPi * f.rot.value();
  double c = std::cos(ang), s = std::sin(ang);
  Vec2 d = p - f.shift;
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

std::optional<int64_t> int_sqrt(int64_t v) {
  if (v < 0) return std::nullopt;
  int64_t r = std::llround(std::sqrt(static_cast<double>(v)));
  for (int64_t c = std::max<int64_t>(0, r - 2); c <= r + 2; ++c)
    if (c * c == v) return c;
  return std::nullopt;
}

std::optional<Rat> rat_sqrt(const Rat& v) {
  if (v < Rat(0)) return std::nullopt;
  auto n = int_sqrt(v.num), d = int_sqrt(v.den);
  if (!n || !d) return std::nullopt;
  return Rat::make(*n, *d);
}

// Positive square root of a + b*sqrt(3) within the same field, if it exists.
std::optional<Q3> q3_sqrt(const Q3& v) {
  auto finish = [&](Q3 root) -> std::optional<Q3> {
    if (root.value() < 0.0) root = Q3{Rat(0), Rat(0)} - root;
    if (root * root == v) return root;
    return std::nullopt;
  };
  if (v.b == Rat(0)) {
    if (auto r = rat_sqrt(v.a)) return finish(Q3{*r, Rat(0)});
    if (auto r = rat_sqrt(v.a / Rat(3))) return finish(Q3{Rat(0), *r});
    return std::nullopt;
  }
  Rat disc = v.a * v.a - Rat(3) * v.b * v.b;
  auto sd = rat_sqrt(disc);
  if (!sd) return std::nullopt;
  for (int branch = 0; branch < 2; ++branch) {
    Rat a2 = (branch == 0 ? v.a + *sd : v.a - *sd) / Rat(2);
    auto ra = rat_sqrt(a2);
    if (!ra || *ra == Rat(0)) continue;
    Rat b = v.b / (Rat(2) * *ra);
    if (auto root = finish(Q3{*ra, b})) return root;
  }
  return std::nullopt;
}

// Index j of the rotation-grid direction pi*j/C matching v, if any.
std::optional<int64_t> grid_direction(Vec2 v, int64_t C) {
  double len = norm(v);
  if (len <= 0.0) return std::nullopt;
  double theta = std::atan2(v.y, v.x);
  int64_t j = std::llround(theta * static_cast<double>(C) / kPi);
  j %= 2 * C;
  if (j < 0) j += 2 * C;
  double ang = kPi * static_cast<double>(j) / static_cast<double>(C);
  Vec2 dir{std::cos(ang), std::sin(ang)};
  Vec2 u{v.x / len, v.y / len};
  if (std::abs(cross(u, dir)) > 1e-9 || dot(u, dir) <= 0.0) return std::nullopt;
  return j;
}

bool covered_by(const SymbolicCoord& c, const DirectionRationalization& dir) {
  if (!c.exact) return false;
  if (dir.C % c.rat.den != 0) return false;
  for (const auto& [idx, coeff] : c.terms) {
    if (dir.C % coeff.den != 0) return false;
    if (!std::binary_search(dir.atom_indices.begin(), dir.atom_indices.end(), idx)) return false;
  }
  return true;
}

// Effective integer multipliers of 2*pi*Z1 and 2*pi*Z2 in p.D1 and p.D2.
std::pair<int64_t, int64_t> effective_quanta(const QuantumState& state) {
  if (state.kind == SkeletonKind::periodic) {
    int64_t s = state.sigma;
    return {state.n * state.kl.first + s * state.m * state.rs.first,
            state.n * state.kl.second + s * state.m * state.rs.second};
  }
  return {state.m, state.n};
}

// Scale factor between the state quantizer and the certified one.
int64_t quantizer_multiple(int64_t state_z, const DirectionRationalization& dir,
                           const char* which) {
  int64_t q = dir.quantizer();
  if (q <= 0 || state_z % q != 0)
    fail(Errc::BadParameters, std::string("state quantizer along ") + which +
                                  " is not a multiple of the certified one");
  return state_z / q;
}

std::string side_label(SideId side) {
  return "side " + std::to_string(side.polygon) + ":" + std::to_string(side.side);
}

}  // namespace

// ---------------------------------------------------------------------------
// Interference sums
// ---------------------------------------------------------------------------

std::complex<double> evaluate(const Epp& epp, const QuantumState& state, Vec2 point) {
  if (!point_in_domain(epp.spec, point))
    fail(Errc::PointOutside, "evaluation point is not in the billiard domain");
  return eval_unchecked(epp, state.p, epp.to_internal(point));
}

std::vector<PlaneWave> direction_waves(const Epp& epp, const QuantumState& state) {
  std::vector<PlaneWave> waves;
  waves.reserve(epp.cells.size());
  for (const EppCell& c : epp.cells) {
    PlaneWave w;
    w.k = c.iso.linear_transposed(state.p);
    w.coeff = cell_sign(c) * unit_phase(dot(state.p, c.iso.t));
    waves.push_back(w);
  }
  return waves;
}

std::complex<double> evaluate_directions(const Epp& epp, const QuantumState& state, Vec2 point) {
  if (!point_in_domain(epp.spec, point))
    fail(Errc::PointOutside, "evaluation point is not in the billiard domain");
  Vec2 x = epp.to_internal(point);
  std::complex<double> total{0.0, 0.0};
  for (const PlaneWave& w : direction_waves(epp, state)) total += w.coeff * unit_phase(dot(w.k, x));
  return total;
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

double rect_closed_form(double a, double b, int64_t zx, int64_t zy, int64_t m, int64_t n,
                        Vec2 pt) {
  return std::sin(kPi * static_cast<double>(m * zx) * pt.x / a) *
         std::sin(kPi * static_cast<double>(n * zy) * pt.y / b);
}

std::complex<double> rotated_closed_form(double a, double b, int64_t zx, int64_t zy, int64_t m,
                                         int64_t n, double h_off, double w_off, Vec2 pt) {
  double straight = rect_closed_form(a, b, zx, zy, m, n, pt);
  double swapped = std::sin(kPi * static_cast<double>(m * zx) * pt.y / a) *
                   std::sin(kPi * static_cast<double>(n * zy) * pt.x / b);
  double phase = kPi *
                 (static_cast<double>(m * zx) / a + static_cast<double>(n * zy) / b) *
                 (h_off + w_off);
  return std::complex<double>(straight, 0.0) - unit_phase(phase) * swapped;
}

double sinai_closed_form(int64_t z, int64_t m, int64_t n, Vec2 pt) {
  double Z = static_cast<double>(z);
  double M = static_cast<double>(m), K = static_cast<double>(2 * n - m);
  double x = pt.x, y = pt.y;
  double t1 = std::sin(6.0 * kPi * M * Z * x) * std::sin(2.0 * kSqrt3 * kPi * K * Z * y);
  double t2 = std::sin(3.0 * kPi * M * Z * (x - kSqrt3 * y)) *
              std::sin(kSqrt3 * kPi * Z * K * (kSqrt3 * x + y));
  double t3 = std::sin(3.0 * kPi * M * Z * (x + kSqrt3 * y)) *
              std::sin(kSqrt3 * kPi * Z * K * (kSqrt3 * x - y));
  return t1 + t2 - t3;
}

double sinai_closed_form_axes(int64_t z, int64_t m, int64_t n, Vec2 pt) {
  double Z = static_cast<double>(z);
  double x = pt.x, y = pt.y;
  double t1 = std::sin(6.0 * kPi * static_cast<double>(m) * Z * x) *
              std::sin(2.0 * kSqrt3 * kPi * static_cast<double>(2 * n - m) * Z * y);
  double t2 = std::sin(6.0 * kPi * static_cast<double>(n) * Z * x) *
              std::sin(2.0 * kSqrt3 * kPi * Z * static_cast<double>(n - 2 * m) * y);
  double t3 = std::sin(6.0 * kPi * static_cast<double>(n - m) * Z * x) *
              std::sin(2.0 * kSqrt3 * kPi * Z * static_cast<double>(n + m) * y);
  return t1 + t2 - t3;
}

std::complex<double> closed_form(const ClosedFormSpec& form, int64_t m, int64_t n, Vec2 pt) {
  switch (form.family) {
    case ClosedFormFamily::RectangularHoles:
      return {rect_closed_form(form.a, form.b, form.zx, form.zy, m, n, pt), 0.0};
    case ClosedFormFamily::RotatedHoles:
      return rotated_closed_form(form.a, form.b, form.zx, form.zy, m, n, form.h_off, form.w_off,
                                 pt);
    case ClosedFormFamily::SinaiTriangle:
      return {sinai_closed_form(form.z, m, n, pt), 0.0};
  }
  fail(Errc::UnknownFamily, "no closed form for this family tag");
}

// ---------------------------------------------------------------------------
// Residual reports
// ---------------------------------------------------------------------------

ResidualReport boundary_residual(const Epp& epp, const QuantumState& state,
                                 const PeriodRationalization& rat, SideId side, int samples) {
  const auto& polys = epp.spec.polygons;
  if (side.polygon < 0 || side.polygon >= static_cast<int>(polys.size()) || side.side < 0 ||
      side.side >= static_cast<int>(polys[static_cast<size_t>(side.polygon)].size()))
    fail(Errc::SideNotFound, "no such side in the billiard");
  if (samples < 1) fail(Errc::BadParameters, "need at least one sample");

  int64_t t1 = quantizer_multiple(state.Z1, rat.x, "D1");
  int64_t t2 = quantizer_multiple(state.Z2, rat.y, "D2");
  auto [m_eff, n_eff] = effective_quanta(state);

  ResidualReport rep;
  rep.label = side_label(side);
  rep.samples = samples;
  rep.n1 = rat.N;
  rep.n2 = rat.N;
  rep.mu1 = static_cast<double>(rat.x.atom_indices.size());
  rep.mu2 = static_cast<double>(rat.y.atom_indices.size());

  Vec2 a = epp.spec.side_a(side), b = epp.spec.side_b(side);
  for (int i = 0; i < samples; ++i) {
    double t = (static_cast<double>(i) + 0.5) / static_cast<double>(samples);
    Vec2 pt = a + t * (b - a);
    rep.measured = std::max(rep.measured, std::abs(eval_unchecked(epp, state.p, epp.to_internal(pt))));
  }

  std::vector<int> period_of(epp.pairings.size(), -1);
  for (size_t k = 0; k < epp.periods.size(); ++k)
    period_of[static_cast<size_t>(epp.periods[k].pairing)] = static_cast<int>(k);

  for (size_t pi = 0; pi < epp.pairings.size(); ++pi) {
    const Pairing& pr = epp.pairings[pi];
    if (!(pr.side == side)) continue;
    int64_t ue = epp.cells[static_cast<size_t>(pr.even_cell)].u;
    int64_t uo = epp.cells[static_cast<size_t>(pr.odd_cell)].u;
    if ((ue + uo) % 2 != 0) {
      // The twin copies interfere with equal signs: no sine cancellation.
      rep.weak_pairs += 1;
      continue;
    }
    if (pr.is_zero) continue;  // exact cancellation
    int k = period_of[pi];
    if (k < 0 || !epp.periods[static_cast<size_t>(k)].coeffs)
      fail(Errc::BadParameters, "periods are not decomposed over a direction pair");
    const auto& [xi, eta] = *epp.periods[static_cast<size_t>(k)].coeffs;
    if (!covered_by(xi, rat.x) || !covered_by(eta, rat.y))
      fail(Errc::BadParameters, "rationalization does not cover this side's coefficients");
    rep.i1 += coefficient_certificate(xi, rat.x);
    rep.i2 += coefficient_certificate(eta, rat.y);
  }

  rep.bound = 2.0 * kPi *
                  (std::abs(static_cast<double>(m_eff * t1)) * rep.i1 * rat.x.bound +
                   std::abs(static_cast<double>(n_eff * t2)) * rep.i2 * rat.y.bound) +
              2.0 * rep.weak_pairs;
  return rep;
}

double rect_hole_side_bound(int64_t quantum, int64_t hole_count, int64_t N) {
  if (hole_count < 1 || N < 1) fail(Errc::BadParameters, "need a hole and N >= 1");
  return kPi * std::abs(static_cast<double>(quantum)) *
         std::pow(static_cast<double>(N), -1.0 / (2.0 * static_cast<double>(hole_count)));
}

double sinai_side_bound(int64_t m, int64_t n, int64_t N) {
  if (N < 1) fail(Errc::BadParameters, "need N >= 1");
  double sum = std::abs(static_cast<double>(m)) + std::abs(static_cast<double>(n)) +
               std::abs(static_cast<double>(m - n));
  return 6.0 * kPi * sum * std::pow(static_cast<double>(N), -0.25);
}

double reglue_bound(const std::pair<SymbolicCoord, SymbolicCoord>& coeffs,
                    const PeriodRationalization& rat, const QuantumState& state) {
  if (!covered_by(coeffs.first, rat.x) || !covered_by(coeffs.second, rat.y))
    fail(Errc::BadParameters, "rationalization does not cover the displacement coefficients");
  int64_t t1 = quantizer_multiple(state.Z1, rat.x, "D1");
  int64_t t2 = quantizer_multiple(state.Z2, rat.y, "D2");
  auto [m_eff, n_eff] = effective_quanta(state);
  return 2.0 * kPi *
         (std::abs(static_cast<double>(m_eff * t1)) * coefficient_certificate(coeffs.first, rat.x) *
              rat.x.bound +
          std::abs(static_cast<double>(n_eff * t2)) *
              coefficient_certificate(coeffs.second, rat.y) * rat.y.bound);
}

// ---------------------------------------------------------------------------
// Sine-product reduction
// ---------------------------------------------------------------------------

double SineProductForm::value_pair(Vec2 pair_pt) const {
  double total = 0.0;
  for (const SineProduct& row : rows)
    total += row.amp * std::sin(row.kx * pair_pt.x) * std::sin(row.ky * pair_pt.y);
  return total;
}

SineProductForm sine_product_reduction(const Epp& epp, const QuantumState& state) {
  if (epp.m != 1 || epp.C % 2 != 0)
    fail(Errc::SymmetryAbsent, "reduction needs a single-sector pattern with even C");
  if (!epp.d_pair) fail(Errc::BadParameters, "no direction pair chosen");

  auto j = grid_direction(epp.d_pair->first.value(), epp.C);
  if (!j) fail(Errc::SymmetryAbsent, "pair direction is not on the rotation grid");

  SineProductForm form;
  form.frame_angle = rat_mod(Rat::make(*j, epp.C), Rat(2));
  if (auto cs = exact_cos_sin_pi(Rat::make(*j, epp.C))) {
    form.cphi = cs->first.value();
    form.sphi = cs->second.value();
  } else {
    double ang = kPi * static_cast<double>(*j) / static_cast<double>(epp.C);
    form.cphi = std::cos(ang);
    form.sphi = std::sin(ang);
  }

  struct Term {
    Vec2 k;
    double s = 1.0;
  };
  std::vector<Term> terms;
  double pnorm = norm(state.p);
  double tol = 1e-9 * (1.0 + pnorm);
  for (const PlaneWave& w : direction_waves(epp, state)) {
    if (std::abs(w.coeff.imag()) > tol || std::abs(std::abs(w.coeff.real()) - 1.0) > tol)
      fail(Errc::SymmetryAbsent, "wave coefficients are not plain signs");
    Term t;
    t.k = form.to_pair_frame(w.k);
    t.s = w.coeff.real() > 0.0 ? 1.0 : -1.0;
    terms.push_back(t);
  }

  std::vector<char> used(terms.size(), 0);
  auto find_term = [&](Vec2 target) -> int {
    for (size_t i = 0; i < terms.size(); ++i) {
      if (used[i]) continue;
      if (std::abs(terms[i].k.x - target.x) <= tol && std::abs(terms[i].k.y - target.y) <= tol)
        return static_cast<int>(i);
    }
    return -1;
  };

  for (size_t i = 0; i < terms.size(); ++i) {
    if (used[i]) continue;
    Vec2 k = terms[i].k;
    if (std::abs(k.x) <= tol || std::abs(k.y) <= tol) {
      // Axis-degenerate wave: admissible only if an identical wave with the
      // opposite sign cancels it.
      used[i] = 1;
      int other = -1;
      for (size_t t = 0; t < terms.size(); ++t)
        if (!used[t] && std::abs(terms[t].k.x - k.x) <= tol &&
            std::abs(terms[t].k.y - k.y) <= tol && terms[t].s == -terms[i].s) {
          other = static_cast<int>(t);
          break;
        }
      if (other < 0) fail(Errc::SymmetryAbsent, "axis-aligned wave does not cancel");
      used[static_cast<size_t>(other)] = 1;
      continue;
    }
    double u = std::abs(k.x), v = std::abs(k.y);
    int pp = find_term({u, v});
    int pm = find_term({u, -v});
    int mp = find_term({-u, v});
    int mm = find_term({-u, -v});
    if (pp < 0 || pm < 0 || mp < 0 || mm < 0)
      fail(Errc::SymmetryAbsent, "momenta do not close under sign flips");
    double s1 = terms[static_cast<size_t>(pp)].s;
    if (terms[static_cast<size_t>(mm)].s != s1 || terms[static_cast<size_t>(pm)].s != -s1 ||
        terms[static_cast<size_t>(mp)].s != -s1)
      fail(Errc::SymmetryAbsent, "wave signs do not pair into products");
    form.rows.push_back({u, v, -4.0 * s1});
    used[static_cast<size_t>(pp)] = used[static_cast<size_t>(pm)] = 1;
    used[static_cast<size_t>(mp)] = used[static_cast<size_t>(mm)] = 1;
  }

  if (static_cast<int64_t>(form.rows.size()) != epp.C / 2)
    fail(Errc::SymmetryAbsent, "reduction does not close into C/2 products");
  return form;
}

// ---------------------------------------------------------------------------
// Singular diagonals
// ---------------------------------------------------------------------------

SdReport singular_diagonals(const Epp& epp, int64_t m, int64_t n, int64_t N, int samples) {
  if (!epp.d_pair) fail(Errc::BadParameters, "no direction pair chosen");
  if (m == 0 && n == 0) fail(Errc::ZeroQuantumNumber, "both quantum numbers vanish");
  if (N < 1 || samples < 1) fail(Errc::BadParameters, "need N >= 1 and samples >= 1");

  const PureVec& d1 = epp.d_pair->first;
  const PureVec& d2 = epp.d_pair->second;
  Q3 dq = d1.x * d2.x + d1.y * d2.y;
  if (!dq.is_zero()) fail(Errc::PeriodsNotOrthogonal, "direction pair is not orthogonal");

  auto j = grid_direction(d1.value(), epp.C);
  if (!j) fail(Errc::SymmetryAbsent, "pair direction is not on the rotation grid");
  auto cs = exact_cos_sin_pi(Rat::make(*j, epp.C));
  if (!cs) fail(Errc::MixedBasis, "pair direction has no exact rotation over the basis");
  Q3 cq = cs->first, sq = cs->second;
  Q3 msq = Q3{Rat(0), Rat(0)} - sq;

  auto len1 = q3_sqrt(d1.x * d1.x + d1.y * d1.y);
  auto len2 = q3_sqrt(d2.x * d2.x + d2.y * d2.y);
  if (!len1 || !len2) fail(Errc::MixedBasis, "pair lengths are not expressible over the basis");

  const Basis& basis = epp.spec.basis;

  // Pair-frame coordinates of every cell image of every vertex.
  std::vector<std::pair<double, SymbolicCoord>> xs, ys;
  for (const EppCell& c : epp.cells) {
    for (size_t l = 0; l < epp.internal_vertices.size(); ++l) {
      for (const SymPoint& vtx : epp.internal_vertices[l]) {
        SymPoint img = c.iso.apply_sym(vtx, basis);
        if (!img.x.exact || !img.y.exact)
          fail(Errc::MixedBasis, "cell image is not expressible over the shared basis");
        SymbolicCoord px = sym_add(sym_scale_q3(img.x, cq, basis), sym_scale_q3(img.y, sq, basis));
        SymbolicCoord py = sym_add(sym_scale_q3(img.x, msq, basis), sym_scale_q3(img.y, cq, basis));
        xs.emplace_back(evaluate_symbolic(px, basis), px);
        ys.emplace_back(evaluate_symbolic(py, basis), py);
      }
    }
  }
  auto dedupe = [](std::vector<std::pair<double, SymbolicCoord>>& vals) {
    std::sort(vals.begin(), vals.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<double, SymbolicCoord>> out;
    for (const auto& v : vals)
      if (out.empty() || v.first - out.back().first > 1e-9) out.push_back(v);
    return out;
  };
  xs = dedupe(xs);
  ys = dedupe(ys);

  // Per-line phase coefficients for the two momentum components.
  int64_t r12 = epp.C / 2;
  if (r12 < 1) fail(Errc::SymmetryAbsent, "rotation order is too small");
  std::vector<std::pair<Q3, Q3>> angles;  // cos, sin of pi*(r-1)/r12
  for (int64_t r = 0; r < r12; ++r) {
    auto a = exact_cos_sin_pi(Rat::make(r, r12));
    if (!a) fail(Errc::MixedBasis, "fan angle has no exact rotation over the basis");
    angles.push_back(*a);
  }

  struct LineData {
    char axis;
    double value;
    SymbolicCoord sym;
    std::vector<SymbolicCoord> mcoords, ncoords;
  };
  std::vector<LineData> line_data;
  for (const auto& [val, sym] : xs) {
    LineData ld{'x', val, sym, {}, {}};
    for (const auto& [ca, sa] : angles) {
      ld.mcoords.push_back(sym_scale_q3(sym, ca / *len1, basis));
      ld.ncoords.push_back(sym_scale_q3(sym, sa / *len2, basis));
    }
    line_data.push_back(std::move(ld));
  }
  for (const auto& [val, sym] : ys) {
    LineData ld{'y', val, sym, {}, {}};
    for (const auto& [ca, sa] : angles) {
      ld.mcoords.push_back(sym_scale_q3(sym, sa / *len1, basis));
      ld.ncoords.push_back(sym_scale_q3(sym, ca / *len2, basis));
    }
    line_data.push_back(std::move(ld));
  }

  std::vector<SymbolicCoord> all_m, all_n;
  for (const LineData& ld : line_data) {
    all_m.insert(all_m.end(), ld.mcoords.begin(), ld.mcoords.end());
    all_n.insert(all_n.end(), ld.ncoords.begin(), ld.ncoords.end());
  }

  SdReport rep;
  rep.N = N;
  rep.cor = rationalize_coordinates(all_m, basis, N);
  rep.run = rationalize_coordinates(all_n, basis, N);

  auto states = quantize_periodic(d1, d2, rep.cor.quantizer(), rep.run.quantizer(), m, n);
  rep.state = states.first;
  rep.form = sine_product_reduction(epp, rep.state);

  // Pair-frame bounding box of the billiard.
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool first = true;
  for (Vec2 pt : epp.internal_pts[0]) {
    Vec2 pp = rep.form.to_pair_frame(pt);
    if (first) {
      xmin = xmax = pp.x;
      ymin = ymax = pp.y;
      first = false;
    } else {
      xmin = std::min(xmin, pp.x);
      xmax = std::max(xmax, pp.x);
      ymin = std::min(ymin, pp.y);
      ymax = std::max(ymax, pp.y);
    }
  }
  double cphi = rep.form.cphi, sphi = rep.form.sphi;
  auto from_pair = [&](Vec2 pp) -> Vec2 {
    return {cphi * pp.x - sphi * pp.y, sphi * pp.x + cphi * pp.y};
  };

  for (const LineData& ld : line_data) {
    double lo = (ld.axis == 'x') ? ymin : xmin;
    double hi = (ld.axis == 'x') ? ymax : xmax;
    double measured = 0.0;
    bool inside_any = false;
    for (int i = 0; i < samples; ++i) {
      double t = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(samples);
      Vec2 pp = (ld.axis == 'x') ? Vec2{ld.value, t} : Vec2{t, ld.value};
      Vec2 orig = frame_unapply(epp.frame, from_pair(pp));
      if (!point_in_domain(epp.spec, orig)) continue;
      inside_any = true;
      measured = std::max(measured, std::abs(rep.form.value_pair(pp)));
    }
    if (!inside_any) continue;  // the folded line misses the billiard

    double i1 = 0.0, i2 = 0.0;
    for (const SymbolicCoord& c : ld.mcoords) i1 += 4.0 * coefficient_certificate(c, rep.cor);
    for (const SymbolicCoord& c : ld.ncoords) i2 += 4.0 * coefficient_certificate(c, rep.run);

    SingularLine line{ld.axis, ld.value, ld.sym};
    ResidualReport r;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%c=%.9g", ld.axis, ld.value);
    r.label = buf;
    r.samples = samples;
    r.measured = measured;
    r.i1 = i1;
    r.i2 = i2;
    r.n1 = N;
    r.n2 = N;
    r.mu1 = static_cast<double>(rep.cor.atom_indices.size());
    r.mu2 = static_cast<double>(rep.run.atom_indices.size());
    r.bound = 2.0 * kPi *
              (std::abs(static_cast<double>(m)) * i1 * rep.cor.bound +
               std::abs(static_cast<double>(n)) * i2 * rep.run.bound);
    rep.lines.push_back(std::move(line));
    rep.reports.push_back(std::move(r));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Grid sampling
// ---------------------------------------------------------------------------

ScalarField grid_field(const Epp& epp, const QuantumState& state, int nx, int ny) {
  if (nx < 2 || ny < 2) fail(Errc::BadResolution, "grid needs at least 2 samples per axis");
  if (static_cast<int64_t>(nx) * static_cast<int64_t>(ny) > 100'000'000)
    fail(Errc::BadResolution, "grid is too large");

  const auto& outer = epp.spec.polygons[0].pts;
  double xmin = outer[0].x, xmax = outer[0].x, ymin = outer[0].y, ymax = outer[0].y;
  for (Vec2 p : outer) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }

  ScalarField field;
  field.x0 = xmin;
  field.y0 = ymin;
  field.nx = nx;
  field.ny = ny;
  field.dx = (xmax - xmin) / static_cast<double>(nx - 1);
  field.dy = (ymax - ymin) / static_cast<double>(ny - 1);
  field.m = state.m;
  field.n = state.n;
  field.energy = state.energy;
  field.values.assign(static_cast<size_t>(nx) * static_cast<size_t>(ny), {0.0, 0.0});
  field.mask.assign(static_cast<size_t>(nx) * static_cast<size_t>(ny), 0);

  parallel_chunks(static_cast<size_t>(ny), [&](size_t, size_t row_begin, size_t row_end) {
    for (size_t iy = row_begin; iy < row_end; ++iy) {
      for (size_t ix = 0; ix < static_cast<size_t>(nx); ++ix) {
        Vec2 pt = field.point(static_cast<int>(ix), static_cast<int>(iy));
        if (!point_in_domain(epp.spec, pt)) continue;
        size_t idx = iy * static_cast<size_t>(nx) + ix;
        field.mask[idx] = 1;
        field.values[idx] = eval_unchecked(epp, state.p, epp.to_internal(pt));
      }
    }
  });
  return field;
}

}  // namespace billiard
