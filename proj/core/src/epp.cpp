#include "billiard/epp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace billiard {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Modular inverse of a mod q (q >= 1, gcd(a, q) == 1).
int64_t mod_inverse(int64_t a, int64_t q) {
  if (q == 1) return 0;
  int64_t t = 0, new_t = 1;
  int64_t r = q, new_r = ((a % q) + q) % q;
  while (new_r != 0) {
    int64_t quot = r / new_r;
    int64_t tmp = t - quot * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - quot * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (r != 1) fail(Errc::BadParameters, "angle numerator not invertible modulo q");
  return ((t % q) + q) % q;
}

SymbolicCoord sym_zero() { return SymbolicCoord(Rat(0)); }

bool sym_is_exact_zero(const SymbolicCoord& c) {
  return c.exact && c.rat.is_zero() && c.terms.empty();
}

SymPoint sym_midpoint(const SymPoint& a, const SymPoint& b) {
  return {sym_scale(sym_add(a.x, b.x), Rat(1, 2)), sym_scale(sym_add(a.y, b.y), Rat(1, 2))};
}

// Pure linear part of a cell slot as an Isometry with zero translation.
Isometry slot_linear(int64_t k, int64_t C, bool odd) {
  Isometry iso;
  iso.k = k;
  iso.C = C;
  iso.odd = odd;
  iso.t = Vec2{0.0, 0.0};
  iso.t_sym = SymPoint{sym_zero(), sym_zero()};
  iso.t_exact = true;
  return iso;
}

}  // namespace

// ---------------------------------------------------------------------------
// Frame map
// ---------------------------------------------------------------------------

Vec2 FrameMap::apply_linear(Vec2 v) const {
  double c, s;
  if (auto cs = exact_cos_sin_pi(rot)) {
    c = cs->first.value();
    s = cs->second.value();
  } else {
    double th = rot.value() * kPi;
    c = std::cos(th);
    s = std::sin(th);
  }
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

SymPoint FrameMap::apply_sym(const SymPoint& p, const Basis& basis) const {
  auto cs = exact_cos_sin_pi(rot);
  if (cs && exact) {
    SymbolicCoord cx = sym_sub(sym_scale_q3(p.x, cs->first, basis), sym_scale_q3(p.y, cs->second, basis));
    SymbolicCoord cy = sym_add(sym_scale_q3(p.x, cs->second, basis), sym_scale_q3(p.y, cs->first, basis));
    SymbolicCoord rx = sym_add(cx, shift_sym.x);
    SymbolicCoord ry = sym_add(cy, shift_sym.y);
    rx.value = evaluate_symbolic(rx, basis);
    ry.value = evaluate_symbolic(ry, basis);
    return {rx, ry};
  }
  Vec2 v = apply(Vec2{p.x.value, p.y.value});
  return {SymbolicCoord::inexact(v.x), SymbolicCoord::inexact(v.y)};
}

// ---------------------------------------------------------------------------
// Twin displacement
// ---------------------------------------------------------------------------

Vec2 twin_displacement(Vec2 point, const Rat& gamma_pi_units) {
  double c, s, s2;  // cos(pi*g), sin(pi*g), sin(2*pi*g)
  if (auto cs = exact_cos_sin_pi(gamma_pi_units)) {
    c = cs->first.value();
    s = cs->second.value();
  } else {
    double g = gamma_pi_units.value() * kPi;
    c = std::cos(g);
    s = std::sin(g);
  }
  s2 = 2.0 * s * c;
  return {-(2.0 * point.x * s * s + point.y * s2), -(point.x * s2 + 2.0 * point.y * c * c)};
}

// ---------------------------------------------------------------------------
// Base vertex selection
// ---------------------------------------------------------------------------

VertexId choose_base_vertex(const BilliardSpec& spec) {
  VertexId best{0, 0};
  int64_t best_q = 0;
  for (int l = 0; l < static_cast<int>(spec.polygons.size()); ++l) {
    for (int v = 0; v < spec.polygons[l].size(); ++v) {
      int64_t qv = spec.angle[l][v].den;
      if (qv > best_q) {
        best_q = qv;
        best = {l, v};
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

namespace {

void validate_vertex(const BilliardSpec& spec, VertexId base) {
  if (base.polygon < 0 || base.polygon >= static_cast<int>(spec.polygons.size()))
    fail(Errc::InvalidVertex, "base polygon index out of range");
  if (base.vertex < 0 || base.vertex >= spec.polygons[base.polygon].size())
    fail(Errc::InvalidVertex, "base vertex index out of range");
}

// Fills frame, internal geometry, and the C/q/m/p' parameters.
void init_frame(Epp& epp) {
  const BilliardSpec& spec = epp.spec;
  const VertexId base = epp.base;

  Rat gamma = spec.angle[base.polygon][base.vertex];
  epp.q = gamma.den;
  epp.p_prime = ((gamma.num % (2 * gamma.den)) + 2 * gamma.den) % (2 * gamma.den);
  epp.C = spec.C;
  if (epp.C % epp.q != 0)
    fail(Errc::AngleSumViolation, "base angle denominator does not divide the rotation order");
  epp.m = epp.C / epp.q;

  Rat theta11 = spec.side_dir[base.polygon][base.vertex];
  FrameMap frame;
  frame.rot = rat_mod(-theta11, Rat(2));
  frame.exact = exact_cos_sin_pi(frame.rot).has_value();

  // shift = -R(base): rotate the base vertex and negate.
  const SymPoint& base_sym = spec.vertex_sym(base);
  if (frame.exact) {
    auto cs = *exact_cos_sin_pi(frame.rot);
    SymbolicCoord bx =
        sym_sub(sym_scale_q3(base_sym.x, cs.first, spec.basis), sym_scale_q3(base_sym.y, cs.second, spec.basis));
    SymbolicCoord by =
        sym_add(sym_scale_q3(base_sym.x, cs.second, spec.basis), sym_scale_q3(base_sym.y, cs.first, spec.basis));
    frame.shift_sym = {sym_neg(bx), sym_neg(by)};
    frame.shift_sym.x.value = evaluate_symbolic(frame.shift_sym.x, spec.basis);
    frame.shift_sym.y.value = evaluate_symbolic(frame.shift_sym.y, spec.basis);
    frame.exact = frame.shift_sym.x.exact && frame.shift_sym.y.exact;
  }
  Vec2 rotated_base = frame.apply_linear(spec.vertex_pt(base));
  frame.shift = -rotated_base;
  if (!frame.exact)
    frame.shift_sym = {SymbolicCoord::inexact(frame.shift.x), SymbolicCoord::inexact(frame.shift.y)};
  epp.frame = frame;

  epp.internal_vertices.resize(spec.polygons.size());
  epp.internal_pts.resize(spec.polygons.size());
  epp.internal_line_dir.resize(spec.polygons.size());
  for (size_t l = 0; l < spec.polygons.size(); ++l) {
    const Polygon& poly = spec.polygons[l];
    epp.internal_vertices[l].reserve(poly.vertices.size());
    epp.internal_pts[l].reserve(poly.vertices.size());
    epp.internal_line_dir[l].reserve(poly.vertices.size());
    for (int v = 0; v < poly.size(); ++v) {
      SymPoint sp = frame.apply_sym(poly.vertices[v], spec.basis);
      epp.internal_vertices[l].push_back(sp);
      epp.internal_pts[l].push_back(frame.apply(poly.pts[v]));
      epp.internal_line_dir[l].push_back(rat_mod(spec.side_dir[l][v] - theta11, Rat(1)));
    }
  }
}

// C * direction of a side in the construction frame; always integral.
int64_t side_tau(const Epp& epp, int l, int j) {
  Rat scaled = Rat(epp.C) * epp.internal_line_dir[l][j];
  if (!scaled.is_integer())
    fail(Errc::UnpairedSide, "side direction incompatible with the rotation order");
  return ((scaled.num % epp.C) + epp.C) % epp.C;
}

Vec2 internal_mid(const Epp& epp, int l, int j) {
  const auto& pts = epp.internal_pts[l];
  Vec2 a = pts[j];
  Vec2 b = pts[(j + 1) % pts.size()];
  return 0.5 * (a + b);
}

SymPoint internal_mid_sym(const Epp& epp, int l, int j) {
  const auto& vs = epp.internal_vertices[l];
  return sym_midpoint(vs[j], vs[(j + 1) % vs.size()]);
}

// Computes the identification vector of a pairing from the current cell
// isometries. is_zero is set to whether the translation vanishes; callers
// translate that into arc status (build keeps it only for fan/chain arcs).
void fill_pairing(const Epp& epp, Pairing& pr) {
  const Isometry& even = epp.cells[pr.even_cell].iso;
  const Isometry& odd = epp.cells[pr.odd_cell].iso;
  Vec2 mid = internal_mid(epp, pr.side.polygon, pr.side.side);
  pr.period = odd.apply(mid) - even.apply(mid);

  SymPoint mid_sym = internal_mid_sym(epp, pr.side.polygon, pr.side.side);
  SymPoint om = odd.apply_sym(mid_sym, epp.spec.basis);
  SymPoint em = even.apply_sym(mid_sym, epp.spec.basis);
  pr.period_sym = {sym_sub(om.x, em.x), sym_sub(om.y, em.y)};
  pr.period_exact = pr.period_sym.x.exact && pr.period_sym.y.exact;
  if (pr.period_exact) {
    pr.period_sym.x.value = evaluate_symbolic(pr.period_sym.x, epp.spec.basis);
    pr.period_sym.y.value = evaluate_symbolic(pr.period_sym.y, epp.spec.basis);
    pr.is_zero = sym_is_exact_zero(pr.period_sym.x) && sym_is_exact_zero(pr.period_sym.y);
  } else {
    pr.is_zero = norm(pr.period) < kGeomTol;
  }

  // The two side images must be parallel translates: the vector computed at
  // an endpoint has to match the one computed at the midpoint.
  const auto& pts = epp.internal_pts[pr.side.polygon];
  Vec2 a = pts[pr.side.side];
  Vec2 alt = odd.apply(a) - even.apply(a);
  if (dist(alt, pr.period) > kGeomTol * (1.0 + norm(pr.period)))
    fail(Errc::UnpairedSide, "side image and twin are not parallel translates");
}

void rebuild_periods(Epp& epp) {
  epp.periods.clear();
  for (size_t i = 0; i < epp.pairings.size(); ++i) {
    const Pairing& pr = epp.pairings[i];
    if (pr.is_zero) continue;
    Period p;
    p.v = pr.period;
    p.sym = pr.period_sym;
    p.exact = pr.period_exact;
    p.pairing = static_cast<int>(i);
    p.side = pr.side;
    p.sector_from = epp.cells[pr.even_cell].u;
    p.sector_to = epp.cells[pr.odd_cell].u;
    epp.periods.push_back(std::move(p));
  }
}

// Solves the sector translations by walking gluing sides: each step forces
// one pairing between consecutive sectors to close up exactly.
void solve_sectors(Epp& epp) {
  const int64_t m = epp.m;
  epp.sector_R.assign(static_cast<size_t>(m) + 1, Vec2{0.0, 0.0});
  epp.sector_R_sym.assign(static_cast<size_t>(m) + 1, SymPoint{sym_zero(), sym_zero()});
  epp.sector_exact = true;
  if (m == 1) return;

  // Lexicographically smallest side of each nonzero sector-shift class.
  std::map<int64_t, SideId> cls;
  for (int l = 0; l < static_cast<int>(epp.spec.polygons.size()); ++l) {
    for (int j = 0; j < epp.spec.polygons[l].size(); ++j) {
      int64_t delta = side_tau(epp, l, j) % m;
      if (delta != 0 && !cls.count(delta)) cls[delta] = SideId{l, j};
    }
  }

  std::vector<char> known(static_cast<size_t>(m) + 1, 0);
  known[1] = 1;

  auto link_sectors = [&](int64_t u, const SideId& s) -> int64_t {
    int64_t tau = side_tau(epp, s.polygon, s.side);
    int64_t e_slot = u - 1;
    int64_t o_slot = (tau + u - 1) % epp.C;
    int64_t v = (o_slot % m) + 1;
    if (known[static_cast<size_t>(v)]) return v;

    Isometry even = slot_linear(e_slot, epp.C, false);
    Isometry odd = slot_linear(o_slot, epp.C, true);
    Vec2 mid = internal_mid(epp, s.polygon, s.side);
    epp.sector_R[static_cast<size_t>(v)] =
        epp.sector_R[static_cast<size_t>(u)] + even.linear(mid) - odd.linear(mid);

    SymPoint mid_sym = internal_mid_sym(epp, s.polygon, s.side);
    SymPoint ev = linear_apply_sym(even, mid_sym, epp.spec.basis);
    SymPoint ov = linear_apply_sym(odd, mid_sym, epp.spec.basis);
    const SymPoint& ru = epp.sector_R_sym[static_cast<size_t>(u)];
    SymPoint rv{sym_add(ru.x, sym_sub(ev.x, ov.x)), sym_add(ru.y, sym_sub(ev.y, ov.y))};
    if (!(rv.x.exact && rv.y.exact)) {
      epp.sector_exact = false;
      rv = {SymbolicCoord::inexact(epp.sector_R[static_cast<size_t>(v)].x),
            SymbolicCoord::inexact(epp.sector_R[static_cast<size_t>(v)].y)};
    } else {
      rv.x.value = evaluate_symbolic(rv.x, epp.spec.basis);
      rv.y.value = evaluate_symbolic(rv.y, epp.spec.basis);
    }
    epp.sector_R_sym[static_cast<size_t>(v)] = rv;
    epp.chain_arcs.push_back({s.polygon, s.side, static_cast<int>(e_slot)});
    known[static_cast<size_t>(v)] = 1;
    return v;
  };

  // Preferred scheme: a single class whose shift generates Z_m.
  int64_t best_delta = 0;
  for (const auto& [delta, side] : cls) {
    if (std::gcd(delta, m) == 1) {
      best_delta = delta;
      break;
    }
  }
  if (best_delta != 0) {
    epp.gluing_delta = best_delta;
    epp.gluing_side = cls[best_delta];
    int64_t u = 1;
    for (int64_t step = 1; step < m; ++step) {
      u = link_sectors(u, cls[best_delta]);
    }
    return;
  }

  // Fallback: breadth-first search over all shift classes.
  std::deque<int64_t> queue{1};
  bool recorded = false;
  while (!queue.empty()) {
    int64_t u = queue.front();
    queue.pop_front();
    for (const auto& [delta, side] : cls) {
      int64_t v = ((u - 1 + delta) % m) + 1;
      if (known[static_cast<size_t>(v)]) continue;
      link_sectors(u, side);
      if (!recorded) {
        epp.gluing_delta = delta;
        epp.gluing_side = side;
        recorded = true;
      }
      queue.push_back(v);
    }
  }
  for (int64_t u = 1; u <= m; ++u) {
    if (!known[static_cast<size_t>(u)])
      fail(Errc::NoGluingSide, "sector graph is disconnected: no chain of gluing sides reaches sector " +
                                   std::to_string(u));
  }
}

}  // namespace

Epp build_sector(const BilliardSpec& spec, VertexId base) {
  validate_vertex(spec, base);
  Epp epp;
  epp.spec = spec;
  epp.base = base;
  init_frame(epp);

  // Fan of sector 1: q rotations followed by their q reflections, all with
  // zero translation. Cell layout here is [even r=1..q, odd r=1..q].
  for (int pass = 0; pass < 2; ++pass) {
    for (int64_t r = 1; r <= epp.q; ++r) {
      int64_t j = (epp.m * epp.p_prime % epp.C) * ((r - 1) % epp.C) % epp.C;
      EppCell cell;
      cell.j = j;
      cell.r = r;
      cell.u = 1;
      cell.odd = (pass == 1);
      cell.iso = slot_linear(j, epp.C, cell.odd);
      epp.cells.push_back(cell);
    }
  }
  return epp;
}

Epp build_full(const BilliardSpec& spec, VertexId base) {
  validate_vertex(spec, base);
  Epp epp;
  epp.spec = spec;
  epp.base = base;
  init_frame(epp);

  solve_sectors(epp);

  // Cells indexed by rotation slot: [j] even, [C + j] odd.
  int64_t inv_p = mod_inverse(epp.p_prime % epp.q == 0 ? 1 : epp.p_prime % epp.q, epp.q);
  epp.cells.resize(static_cast<size_t>(2 * epp.C));
  for (int64_t j = 0; j < epp.C; ++j) {
    int64_t u = (j % epp.m) + 1;
    int64_t r = (j / epp.m) * inv_p % epp.q + 1;
    for (int parity = 0; parity < 2; ++parity) {
      EppCell cell;
      cell.j = j;
      cell.r = r;
      cell.u = u;
      cell.odd = (parity == 1);
      cell.iso = slot_linear(j, epp.C, cell.odd);
      cell.iso.t = epp.sector_R[static_cast<size_t>(u)];
      cell.iso.t_sym = epp.sector_R_sym[static_cast<size_t>(u)];
      cell.iso.t_exact = epp.sector_R_sym[static_cast<size_t>(u)].x.exact &&
                         epp.sector_R_sym[static_cast<size_t>(u)].y.exact;
      epp.cells[static_cast<size_t>(parity == 0 ? j : epp.C + j)] = cell;
    }
  }

  // The gluing arcs are structural: the two base-vertex sides close the fan
  // in every slot, and the sector chain closes one pairing per link. Any
  // other pairing is a period even if its translation happens to vanish
  // (opposite sides of a symmetric hole can coincide by accident).
  int base_n = static_cast<int>(spec.polygons[base.polygon].size());
  SideId fan_out{base.polygon, base.vertex};
  SideId fan_in{base.polygon, (base.vertex + base_n - 1) % base_n};

  int64_t arc_count = 0;
  for (int l = 0; l < static_cast<int>(spec.polygons.size()); ++l) {
    for (int j = 0; j < spec.polygons[l].size(); ++j) {
      int64_t tau = side_tau(epp, l, j);
      SideId sid{l, j};
      for (int64_t e = 0; e < epp.C; ++e) {
        Pairing pr;
        pr.side = sid;
        pr.even_cell = epp.even_index(e);
        pr.odd_cell = epp.odd_index((tau + e) % epp.C);
        pr.delta = tau % epp.m;
        fill_pairing(epp, pr);

        bool structural = (sid == fan_out || sid == fan_in);
        for (const auto& arc : epp.chain_arcs)
          structural = structural || (arc[0] == l && arc[1] == j && arc[2] == e);
        if (structural && !pr.is_zero)
          fail(Errc::UnpairedSide, "a gluing arc fails to close onto its twin");
        pr.is_zero = structural;
        if (structural) ++arc_count;
        epp.pairings.push_back(std::move(pr));
      }
    }
  }

  // The fan contributes 2C gluing arcs and the sector chain m-1 more.
  if (arc_count != 2 * epp.C + (epp.m - 1))
    fail(Errc::UnpairedSide, "pattern has " + std::to_string(arc_count) +
                                 " gluing arcs, expected " + std::to_string(2 * epp.C + epp.m - 1));
  rebuild_periods(epp);
  return epp;
}

// ---------------------------------------------------------------------------
// Euler counts
// ---------------------------------------------------------------------------

GenusReport compute_genus(const BilliardSpec& spec) {
  Rat sum_pq(0), sum_1q(0);
  for (const auto& poly_angles : spec.angle) {
    for (const Rat& g : poly_angles) {
      sum_pq += g;
      sum_1q += Rat(1, g.den);
    }
  }
  GenusReport rep;
  Rat c(spec.C);
  rep.E = c * sum_pq + Rat(4) * c;
  rep.V = c * sum_1q;
  rep.S = Rat(4) * c;
  Rat genus = (rep.E - rep.V - rep.S + Rat(2)) / Rat(2);
  if (!rep.E.is_integer() || !rep.V.is_integer() || !genus.is_integer())
    fail(Errc::AngleSumViolation, "Euler counts of the identified complex are not integral");
  rep.genus = genus.num;
  return rep;
}

// ---------------------------------------------------------------------------
// Period decomposition over a direction pair
// ---------------------------------------------------------------------------

void decompose_periods(Epp& epp, const PureVec& d1, const PureVec& d2) {
  Q3 cross_q3 = d1.x * d2.y - d1.y * d2.x;
  if (std::abs(cross_q3.value()) < 1e-12)
    fail(Errc::DegeneratePeriods, "direction pair is linearly dependent");

  Vec2 d1v = d1.value();
  Vec2 d2v = d2.value();
  double cr = cross(d1v, d2v);
  for (Period& p : epp.periods) {
    SymbolicCoord xi, eta;
    if (p.exact) {
      xi = sym_sub(sym_scale_q3(p.sym.x, d2.y / cross_q3, epp.spec.basis),
                   sym_scale_q3(p.sym.y, d2.x / cross_q3, epp.spec.basis));
      eta = sym_sub(sym_scale_q3(p.sym.y, d1.x / cross_q3, epp.spec.basis),
                    sym_scale_q3(p.sym.x, d1.y / cross_q3, epp.spec.basis));
      xi.value = evaluate_symbolic(xi, epp.spec.basis);
      eta.value = evaluate_symbolic(eta, epp.spec.basis);
    } else {
      xi = SymbolicCoord::inexact(cross(p.v, d2v) / cr);
      eta = SymbolicCoord::inexact(cross(d1v, p.v) / cr);
    }
    Vec2 recon = xi.value * d1v + eta.value * d2v;
    if (dist(recon, p.v) > kGeomTol * (1.0 + norm(p.v)))
      fail(Errc::DegeneratePeriods, "period decomposition failed to reconstruct the period");
    p.coeffs = std::make_pair(std::move(xi), std::move(eta));
  }
  epp.d_pair = std::make_pair(d1, d2);
}

namespace {

// Interprets an exact coordinate as a + b*sqrt(3) when its only atom is the
// sqrt(3) unit itself.
std::optional<Q3> coord_as_q3(const SymbolicCoord& c, const Basis& basis) {
  if (!c.exact) return std::nullopt;
  Q3 out{c.rat, Rat(0)};
  for (const auto& [idx, coeff] : c.terms) {
    if (idx == basis.sqrt3_index)
      out.b += coeff;
    else
      return std::nullopt;
  }
  return out;
}

}  // namespace

std::optional<std::pair<PureVec, PureVec>> suggest_pair(const Epp& epp) {
  std::vector<PureVec> pure;
  for (const Period& p : epp.periods) {
    if (norm(p.v) < kGeomTol) continue;  // coincident twins carry no direction
    auto qx = coord_as_q3(p.sym.x, epp.spec.basis);
    auto qy = coord_as_q3(p.sym.y, epp.spec.basis);
    if (qx && qy) pure.push_back(PureVec{*qx, *qy});
  }
  if (pure.size() < 2) return std::nullopt;
  std::sort(pure.begin(), pure.end(), [](const PureVec& a, const PureVec& b) {
    Vec2 av = a.value(), bv = b.value();
    double na = norm2(av), nb = norm2(bv);
    if (std::abs(na - nb) > 1e-12) return na < nb;
    if (std::abs(av.x - bv.x) > 1e-12) return av.x < bv.x;
    return av.y < bv.y;
  });
  const PureVec& d1 = pure.front();
  Vec2 d1v = d1.value();
  for (size_t i = 1; i < pure.size(); ++i) {
    if (std::abs(cross(d1v, pure[i].value())) > kGeomTol) {
      return std::make_pair(d1, pure[i]);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Regluing
// ---------------------------------------------------------------------------

Epp reglue(const Epp& epp, int cell_index, SideId side) {
  if (cell_index < 0 || cell_index >= static_cast<int>(epp.cells.size()))
    fail(Errc::NotBoundaryCell, "cell index out of range");

  bool boundary = false;
  int target = -1;
  for (size_t i = 0; i < epp.pairings.size(); ++i) {
    const Pairing& pr = epp.pairings[i];
    bool involves = pr.even_cell == cell_index || pr.odd_cell == cell_index;
    if (involves && !pr.is_zero) boundary = true;
    if (involves && pr.side == side && target < 0) target = static_cast<int>(i);
  }
  if (!boundary) fail(Errc::NotBoundaryCell, "cell participates in no nonzero identification");
  if (target < 0) fail(Errc::SideNotFound, "cell has no pairing on that side");
  if (epp.pairings[static_cast<size_t>(target)].is_zero)
    fail(Errc::NotTwinSide, "pairing on that side is already a gluing arc");

  Epp out = epp;
  Pairing& pr = out.pairings[static_cast<size_t>(target)];
  bool moving_odd = (pr.odd_cell == cell_index);
  Vec2 delta = moving_odd ? -pr.period : pr.period;
  SymPoint delta_sym = moving_odd
                           ? SymPoint{sym_neg(pr.period_sym.x), sym_neg(pr.period_sym.y)}
                           : pr.period_sym;

  Isometry& iso = out.cells[static_cast<size_t>(cell_index)].iso;
  iso.t = iso.t + delta;
  iso.t_sym = {sym_add(iso.t_sym.x, delta_sym.x), sym_add(iso.t_sym.y, delta_sym.y)};
  iso.t_exact = iso.t_exact && pr.period_exact;
  if (iso.t_exact) {
    iso.t_sym.x.value = evaluate_symbolic(iso.t_sym.x, out.spec.basis);
    iso.t_sym.y.value = evaluate_symbolic(iso.t_sym.y, out.spec.basis);
  } else {
    iso.t_sym = {SymbolicCoord::inexact(iso.t.x), SymbolicCoord::inexact(iso.t.y)};
  }

  for (Pairing& other : out.pairings) {
    if (other.even_cell != cell_index && other.odd_cell != cell_index) continue;
    // A gluing arc stays one only while it still closes; a period never
    // becomes an arc, even if the move makes its translation vanish.
    bool structural = other.is_zero;
    fill_pairing(out, other);
    other.is_zero = structural && other.is_zero;
  }
  rebuild_periods(out);
  return out;
}

}  // namespace billiard
