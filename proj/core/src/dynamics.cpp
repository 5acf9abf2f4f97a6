#include "billiard/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "billiard/diophantine.hpp"
#include "billiard/errors.hpp"
#include "billiard/parallel.hpp"
#include "billiard/symbolic.hpp"

namespace billiard {

namespace {

constexpr double kPi = std::numbers::pi_v<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi_v<double>;
constexpr double kSqrt3 = std::numbers::sqrt3_v<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimum ray advance: hits closer than this are the surface we just left.
constexpr double kRayMin = 1e-9;
// Corner / grazing detection scale.
constexpr double kContactTol = 1e-9;
// Seeds tried per bounce sequence in the periodic-orbit search.
constexpr int kSeedsPerSequence = 64;

Vec2 unit_dir(double angle) { return {std::cos(angle), std::sin(angle)}; }

Vec2 normalized(Vec2 v) {
  double n = norm(v);
  if (n < 1e-15) fail(Errc::BadParameters, "zero direction vector");
  return (1.0 / n) * v;
}

double seg_dist(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 d = b - a;
  double len2 = norm2(d);
  if (len2 == 0.0) return dist(p, a);
  double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return dist(p, a + t * d);
}

double signed_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    s += cross(a, b);
  }
  return 0.5 * s;
}

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
  double d1 = cross(b - a, c - a);
  double d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c);
  double d4 = cross(d - c, b - c);
  if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
      ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol)))
    return true;
  if (seg_dist(c, a, b) <= tol || seg_dist(d, a, b) <= tol) return true;
  if (seg_dist(a, c, d) <= tol || seg_dist(b, c, d) <= tol) return true;
  return false;
}

void require_simple(const std::vector<Vec2>& poly) {
  int n = static_cast<int>(poly.size());
  if (n < 3) fail(Errc::NonSimplePolygon, "outer polygon needs at least 3 vertices");
  for (int i = 0; i < n; ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % n];
    if (dist(a, b) <= kContactTol) fail(Errc::NonSimplePolygon, "degenerate outer side");
    for (int j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_cross(a, b, poly[j], poly[(j + 1) % n], kContactTol))
        fail(Errc::NonSimplePolygon, "outer polygon self-intersects");
    }
  }
}

// ---------------------------------------------------------------------------
// Ray stepping
// ---------------------------------------------------------------------------

struct Hit {
  double t = kInf;
  int surface = -1;
  Vec2 point{};
  bool near_vertex = false;
  bool grazing = false;
};

// Earliest boundary contact of the ray p + t*d (d unit) with t > tmin.
std::optional<Hit> first_hit(const CurvedBilliard& cb, Vec2 p, Vec2 d, double tmin) {
  Hit best;
  int sides = cb.sides();
  for (int i = 0; i < sides; ++i) {
    auto [a, b] = cb.side(i);
    Vec2 e = b - a;
    double denom = cross(d, e);
    if (std::abs(denom) < 1e-14) continue;  // parallel to the side
    double t = cross(a - p, e) / denom;
    double s = cross(a - p, d) / denom;
    if (t <= tmin || s < -1e-12 || s > 1.0 + 1e-12) continue;
    if (t < best.t) {
      best.t = t;
      best.surface = i;
      best.point = p + t * d;
      best.near_vertex =
          dist(best.point, a) <= kContactTol || dist(best.point, b) <= kContactTol;
      best.grazing = false;
    }
  }
  for (size_t j = 0; j < cb.circles.size(); ++j) {
    const Circle& c = cb.circles[j];
    Vec2 m = p - c.center;
    double bh = dot(m, d);
    double c0 = norm2(m) - c.radius * c.radius;
    double disc = bh * bh - c0;
    if (disc < 0.0) continue;
    double sq = std::sqrt(disc);
    double t = -bh - sq;
    if (t <= tmin) t = -bh + sq;
    if (t <= tmin) continue;
    if (t < best.t) {
      best.t = t;
      best.surface = sides + static_cast<int>(j);
      best.point = p + t * d;
      best.near_vertex = false;
      // Radial approach speed ~ 0 means the ray only grazes the circle.
      Vec2 outward = (1.0 / c.radius) * (best.point - c.center);
      best.grazing = std::abs(dot(d, outward)) <= kContactTol || sq <= kContactTol;
    }
  }
  if (best.surface < 0) return std::nullopt;
  return best;
}

Vec2 surface_normal(const CurvedBilliard& cb, int id, Vec2 at) {
  if (cb.is_circle_surface(id)) {
    const Circle& c = cb.circle_of(id);
    return (1.0 / c.radius) * (at - c.center);
  }
  auto [a, b] = cb.side(id);
  Vec2 e = normalized(b - a);
  return {-e.y, e.x};  // interior side for a counterclockwise polygon
}

Vec2 reflect_dir(Vec2 d, Vec2 n) { return d - (2.0 * dot(d, n)) * n; }

// ---------------------------------------------------------------------------
// Periodic orbits: stationary points of the cyclic path length
// ---------------------------------------------------------------------------

// Bounce point for parameter t: sides use the chord parameter, circles the angle.
Vec2 bounce_point(const CurvedBilliard& cb, int id, double t) {
  if (cb.is_circle_surface(id)) {
    const Circle& c = cb.circle_of(id);
    return c.center + c.radius * unit_dir(t);
  }
  auto [a, b] = cb.side(id);
  return a + t * (b - a);
}

Vec2 bounce_velocity(const CurvedBilliard& cb, int id, double t) {
  if (cb.is_circle_surface(id)) {
    const Circle& c = cb.circle_of(id);
    Vec2 u = unit_dir(t);
    return c.radius * Vec2{-u.y, u.x};
  }
  auto [a, b] = cb.side(id);
  return b - a;
}

struct PathEval {
  double length = 0.0;
  bool valid = false;
  std::vector<Vec2> pts;
};

PathEval eval_path(const CurvedBilliard& cb, const std::vector<int>& seq,
                   const std::vector<double>& t) {
  PathEval e;
  size_t L = seq.size();
  e.pts.resize(L);
  for (size_t i = 0; i < L; ++i) e.pts[i] = bounce_point(cb, seq[i], t[i]);
  for (size_t i = 0; i < L; ++i) {
    double leg = dist(e.pts[i], e.pts[(i + 1) % L]);
    if (leg < 1e-10) return e;
    e.length += leg;
  }
  e.valid = true;
  return e;
}

// Analytic gradient of the cyclic length in the bounce parameters.
bool eval_gradient(const CurvedBilliard& cb, const std::vector<int>& seq,
                   const std::vector<double>& t, std::vector<double>& g, double* len_out) {
  size_t L = seq.size();
  PathEval e = eval_path(cb, seq, t);
  if (!e.valid) return false;
  g.assign(L, 0.0);
  for (size_t i = 0; i < L; ++i) {
    Vec2 out = e.pts[(i + 1) % L] - e.pts[i];
    Vec2 in = e.pts[i] - e.pts[(i + L - 1) % L];
    Vec2 du = (1.0 / norm(in)) * in - (1.0 / norm(out)) * out;
    g[i] = dot(bounce_velocity(cb, seq[i], t[i]), du);
  }
  if (len_out) *len_out = e.length;
  return true;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Central-difference Hessian of the length from the analytic gradient.
bool eval_hessian(const CurvedBilliard& cb, const std::vector<int>& seq,
                  std::vector<double> t, std::vector<std::vector<double>>& H) {
  size_t L = seq.size();
  double h = 1e-6;
  H.assign(L, std::vector<double>(L, 0.0));
  std::vector<double> gp, gm;
  for (size_t i = 0; i < L; ++i) {
    double saved = t[i];
    t[i] = saved + h;
    bool okp = eval_gradient(cb, seq, t, gp, nullptr);
    t[i] = saved - h;
    bool okm = eval_gradient(cb, seq, t, gm, nullptr);
    t[i] = saved;
    if (!okp || !okm) return false;
    for (size_t j = 0; j < L; ++j) H[i][j] = (gp[j] - gm[j]) / (2.0 * h);
  }
  for (size_t i = 0; i < L; ++i)
    for (size_t j = i + 1; j < L; ++j) {
      double s = 0.5 * (H[i][j] + H[j][i]);
      H[i][j] = H[j][i] = s;
    }
  return true;
}

// Gaussian elimination with partial pivoting; false when near-singular.
bool solve_linear(std::vector<std::vector<double>> A, std::vector<double> b,
                  std::vector<double>& x) {
  size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    if (std::abs(A[piv][col]) < 1e-13) return false;
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (size_t r = col + 1; r < n; ++r) {
      double f = A[r][col] / A[col][col];
      if (f == 0.0) continue;
      for (size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (size_t c = ri + 1; c < n; ++c) s -= A[ri][c] * x[c];
    x[ri] = s / A[ri][ri];
  }
  return true;
}

// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> A) {
  size_t n = A.size();
  for (int sweep = 0; sweep < 40; ++sweep) {
    double off = 0.0;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) off += A[i][j] * A[i][j];
    if (off < 1e-24) break;
    for (size_t p = 0; p < n; ++p)
      for (size_t q = p + 1; q < n; ++q) {
        if (std::abs(A[p][q]) < 1e-15) continue;
        double theta = 0.5 * (A[q][q] - A[p][p]) / A[p][q];
        double sign = theta >= 0.0 ? 1.0 : -1.0;
        double t = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (size_t k = 0; k < n; ++k) {
          double akp = A[k][p], akq = A[k][q];
          A[k][p] = c * akp - s * akq;
          A[k][q] = s * akp + c * akq;
        }
        for (size_t k = 0; k < n; ++k) {
          double apk = A[p][k], aqk = A[q][k];
          A[p][k] = c * apk - s * aqk;
          A[q][k] = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (size_t i = 0; i < n; ++i) ev[i] = A[i][i];
  return ev;
}

// Damped Newton search for a stationary point of the cyclic length.
bool newton_stationary(const CurvedBilliard& cb, const std::vector<int>& seq,
                       std::vector<double>& t) {
  size_t L = seq.size();
  std::vector<double> g, gtrial, delta;
  std::vector<std::vector<double>> H;
  double len = 0.0;
  for (int iter = 0; iter < 80; ++iter) {
    if (!eval_gradient(cb, seq, t, g, &len)) return false;
    double gn = max_abs(g);
    if (gn < 1e-12 * (1.0 + len)) return true;
    if (!eval_hessian(cb, seq, t, H)) return false;
    bool solved = false;
    for (double mu : {0.0, 1e-8, 1e-6, 1e-4, 1e-2, 1.0}) {
      auto Ht = H;
      for (size_t i = 0; i < L; ++i) Ht[i][i] += mu;
      std::vector<double> rhs(L);
      for (size_t i = 0; i < L; ++i) rhs[i] = -g[i];
      if (!solve_linear(Ht, rhs, delta)) continue;
      double dn = max_abs(delta);
      if (!std::isfinite(dn)) continue;
      if (dn > 0.75)
        for (double& d : delta) d *= 0.75 / dn;
      solved = true;
      break;
    }
    if (!solved) return false;
    // Backtrack on the gradient norm so saddle points are valid targets.
    double alpha = 1.0;
    bool accepted = false;
    std::vector<double> trial(L);
    while (alpha >= 1.0 / 4096.0) {
      for (size_t i = 0; i < L; ++i) trial[i] = t[i] + alpha * delta[i];
      if (eval_gradient(cb, seq, trial, gtrial, nullptr) &&
          max_abs(gtrial) <= (1.0 - 1e-4 * alpha) * gn) {
        t = trial;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) return false;
  }
  if (!eval_gradient(cb, seq, t, g, &len)) return false;
  return max_abs(g) < 1e-11 * (1.0 + len);
}

// Physical validation of a converged stationary configuration.
std::optional<Orbit> validate_orbit(const CurvedBilliard& cb, const std::vector<int>& seq,
                                    const std::vector<double>& t, double max_length) {
  size_t L = seq.size();
  PathEval e = eval_path(cb, seq, t);
  if (!e.valid) return std::nullopt;
  if (e.length > max_length + 1e-9) return std::nullopt;
  for (size_t i = 0; i < L; ++i) {
    if (!cb.is_circle_surface(seq[i])) {
      // Keep clear of the corners; a vertex contact is not a specular bounce.
      if (t[i] < 1e-6 || t[i] > 1.0 - 1e-6) return std::nullopt;
    }
  }
  for (size_t i = 0; i < L; ++i) {
    size_t nx = (i + 1) % L, pv = (i + L - 1) % L;
    Vec2 d_out = normalized(e.pts[nx] - e.pts[i]);
    Vec2 d_in = normalized(e.pts[i] - e.pts[pv]);
    Vec2 n = surface_normal(cb, seq[i], e.pts[i]);
    // Bounces must come from the domain side of the surface.
    if (dot(d_in, n) > -1e-12) return std::nullopt;
    if (dist(reflect_dir(d_in, n), d_out) > kContactTol) return std::nullopt;
    // The leg must reach the next bounce without obstruction.
    double leg = dist(e.pts[i], e.pts[nx]);
    auto hit = first_hit(cb, e.pts[i], d_out, kRayMin);
    if (!hit || hit->surface != seq[nx]) return std::nullopt;
    if (std::abs(hit->t - leg) > 1e-7 * (1.0 + leg)) return std::nullopt;
  }
  Orbit o;
  o.points = e.pts;
  o.surfaces = seq;
  o.length = e.length;
  for (int id : seq) o.hits_circle = o.hits_circle || cb.is_circle_surface(id);
  std::vector<std::vector<double>> H;
  o.tag = StabilityTag::isolated;
  if (eval_hessian(cb, seq, t, H)) {
    auto ev = jacobi_eigenvalues(H);
    double top = 0.0;
    for (double v : ev) top = std::max(top, std::abs(v));
    double low = kInf;
    for (double v : ev) low = std::min(low, std::abs(v));
    if (low <= 1e-5 * std::max(1.0, top)) o.tag = StabilityTag::family;
  }
  return o;
}

// Lexicographically smallest representation over rotations and reversal.
std::vector<int> canonical_cycle(std::vector<int> seq) {
  size_t L = seq.size();
  std::vector<int> best = seq;
  auto consider = [&](const std::vector<int>& s) {
    for (size_t r = 0; r < L; ++r) {
      std::vector<int> cand(L);
      for (size_t i = 0; i < L; ++i) cand[i] = s[(r + i) % L];
      if (cand < best) best = cand;
    }
  };
  consider(seq);
  std::reverse(seq.begin(), seq.end());
  consider(seq);
  return best;
}

std::vector<std::vector<int>> canonical_sequences(int surfaces, int max_bounces) {
  double raw = 0.0;
  for (int len = 2; len <= max_bounces; ++len)
    raw += static_cast<double>(surfaces) * std::pow(double(surfaces - 1), len - 1);
  if (raw > 4e6)
    fail(Errc::BadParameters, "too many bounce sequences for an exhaustive search");
  std::vector<std::vector<int>> out;
  auto emit = [&](int len) {
    std::vector<int> rec(len, 0);
    auto rec_build = [&](auto&& self, int pos) -> void {
      if (pos == len) {
        if (rec[len - 1] == rec[0]) return;
        if (canonical_cycle(rec) == rec) out.push_back(rec);
        return;
      }
      for (int s = rec[0]; s < surfaces; ++s) {
        if (s == rec[pos - 1]) continue;
        rec[pos] = s;
        self(self, pos + 1);
      }
    };
    for (int s0 = 0; s0 < surfaces; ++s0) {
      rec[0] = s0;
      rec_build(rec_build, 1);
    }
  };
  for (int len = 2; len <= max_bounces; ++len) emit(len);
  return out;
}

// Low-discrepancy seed grid (Kronecker sequence from the x^{d+1} = x + 1 root).
std::vector<double> seed_params(const CurvedBilliard& cb, const std::vector<int>& seq,
                                int seed) {
  size_t L = seq.size();
  double g = 1.5;
  for (int i = 0; i < 48; ++i) g = std::pow(1.0 + g, 1.0 / (double(L) + 1.0));
  std::vector<double> t(L);
  double alpha = 1.0;
  for (size_t i = 0; i < L; ++i) {
    alpha /= g;
    double u = 0.5 + alpha * (seed + 1);
    u -= std::floor(u);
    t[i] = cb.is_circle_surface(seq[i]) ? kTwoPi * u : 0.02 + 0.96 * u;
  }
  return t;
}

struct CanonicalOrbit {
  std::vector<int> seq;
  std::vector<Vec2> pts;
};

CanonicalOrbit canonical_orbit(const Orbit& o) {
  size_t L = o.points.size();
  auto key = [](const std::vector<int>& s, const std::vector<Vec2>& p) {
    std::vector<int64_t> k;
    k.reserve(s.size() * 3);
    for (size_t i = 0; i < s.size(); ++i) {
      k.push_back(s[i]);
      k.push_back(llround(p[i].x * 1e7));
      k.push_back(llround(p[i].y * 1e7));
    }
    return k;
  };
  CanonicalOrbit best{o.surfaces, o.points};
  auto best_key = key(best.seq, best.pts);
  auto consider = [&](const std::vector<int>& s, const std::vector<Vec2>& p) {
    for (size_t r = 0; r < L; ++r) {
      std::vector<int> cs(L);
      std::vector<Vec2> cp(L);
      for (size_t i = 0; i < L; ++i) {
        cs[i] = s[(r + i) % L];
        cp[i] = p[(r + i) % L];
      }
      auto k = key(cs, cp);
      if (k < best_key) {
        best_key = std::move(k);
        best = {std::move(cs), std::move(cp)};
      }
    }
  };
  consider(o.surfaces, o.points);
  std::vector<int> rs(o.surfaces.rbegin(), o.surfaces.rend());
  std::vector<Vec2> rp(o.points.rbegin(), o.points.rend());
  consider(rs, rp);
  return best;
}

bool same_orbit(const CurvedBilliard& dom, const Orbit& a, const CanonicalOrbit& ca,
                const Orbit& b, const CanonicalOrbit& cb_) {
  if (ca.seq != cb_.seq) return false;
  if (std::abs(a.length - b.length) > 1e-7 * (1.0 + a.length)) return false;
  bool close = true;
  for (size_t i = 0; i < ca.pts.size() && close; ++i)
    close = dist(ca.pts[i], cb_.pts[i]) <= 1e-6;
  if (close) return true;
  // Members of one continuous family share the sequence and the length, and
  // their pointwise midpoint is again an unobstructed orbit of that family.
  if (a.tag != StabilityTag::family || b.tag != StabilityTag::family) return false;
  size_t L = ca.pts.size();
  std::vector<Vec2> mid(L);
  for (size_t i = 0; i < L; ++i) mid[i] = 0.5 * (ca.pts[i] + cb_.pts[i]);
  for (size_t i = 0; i < L; ++i) {
    size_t nx = (i + 1) % L;
    double leg = dist(mid[i], mid[nx]);
    if (leg < 1e-10) return false;
    Vec2 d = (1.0 / leg) * (mid[i + 1 == L ? 0 : i + 1] - mid[i]);
    auto hit = first_hit(dom, mid[i], d, kRayMin);
    if (!hit || hit->surface != ca.seq[nx]) return false;
    if (std::abs(hit->t - leg) > 1e-6 * (1.0 + leg)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Coordinate symbolization for the envelope pipeline
// ---------------------------------------------------------------------------

SymbolicCoord symbolize_value(double v, Basis& basis) {
  if (auto r = rat_from_double(v, 10000, 1e-9)) return SymbolicCoord::rational(*r);
  if (auto r = rat_from_double(v / kSqrt3, 10000, 1e-9)) {
    int idx = basis.find_or_add("sqrt3", kSqrt3);
    return SymbolicCoord::atom(idx, kSqrt3, *r);
  }
  for (size_t i = 0; i < basis.size(); ++i) {
    double av = basis.atoms[i].value;
    if (std::abs(av - v) <= 1e-12 * std::max(1.0, std::abs(v)))
      return SymbolicCoord::atom(static_cast<int>(i), av);
  }
  int idx = basis.find_or_add("c" + std::to_string(basis.size()), v);
  return SymbolicCoord::atom(idx, v);
}

// tan(pi*k/12) for k = 1..5 in the sqrt(3) field.
std::optional<Q3> tan_pi_over_12(int64_t k) {
  switch (k) {
    case 1: return Q3{Rat(2), Rat(-1)};
    case 2: return Q3{Rat(0), Rat(1, 3)};
    case 3: return Q3{Rat(1), Rat(0)};
    case 4: return Q3{Rat(0), Rat(1)};
    case 5: return Q3{Rat(2), Rat(1)};
    default: return std::nullopt;
  }
}

double wrap_two_pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

// Circular clustering: angles within `gap_tol` of a neighbor share a cluster.
std::vector<double> cluster_angles(std::vector<double> angles, double gap_tol) {
  for (double& a : angles) a = wrap_two_pi(a);
  std::sort(angles.begin(), angles.end());
  size_t n = angles.size();
  if (n == 0) return {};
  // Rotate so the list starts right after the widest gap.
  size_t start = 0;
  double widest = angles.front() + kTwoPi - angles.back();
  for (size_t i = 1; i < n; ++i) {
    double g = angles[i] - angles[i - 1];
    if (g > widest) {
      widest = g;
      start = i;
    }
  }
  std::rotate(angles.begin(), angles.begin() + start, angles.end());
  for (size_t i = 1; i < n; ++i)
    if (angles[i] < angles[i - 1]) angles[i] += kTwoPi;
  std::vector<double> means;
  size_t begin = 0;
  for (size_t i = 1; i <= n; ++i) {
    if (i == n || angles[i] - angles[i - 1] > gap_tol) {
      double sum = 0.0;
      for (size_t j = begin; j < i; ++j) sum += angles[j];
      means.push_back(wrap_two_pi(sum / double(i - begin)));
      begin = i;
    }
  }
  std::sort(means.begin(), means.end());
  return means;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public interface
// ---------------------------------------------------------------------------

std::pair<Vec2, Vec2> CurvedBilliard::side(int id) const {
  return {outer[static_cast<size_t>(id)],
          outer[static_cast<size_t>((id + 1) % sides())]};
}

CurvedBilliard make_curved(std::vector<Vec2> outer, std::vector<Circle> circles) {
  require_simple(outer);
  if (signed_area(outer) < 0.0) std::reverse(outer.begin(), outer.end());
  CurvedBilliard cb{std::move(outer), std::move(circles)};
  for (size_t j = 0; j < cb.circles.size(); ++j) {
    const Circle& c = cb.circles[j];
    if (!(c.radius > 0.0)) fail(Errc::BadParameters, "circle radius must be positive");
    if (!point_in_polygon(cb.outer, c.center, 0.0))
      fail(Errc::HoleOutsideOuter, "circle center outside the outer polygon");
    for (int i = 0; i < cb.sides(); ++i) {
      auto [a, b] = cb.side(i);
      if (seg_dist(c.center, a, b) <= c.radius + kContactTol)
        fail(Errc::HoleOutsideOuter, "circle touches the outer boundary");
    }
    for (size_t k = 0; k < j; ++k)
      if (dist(c.center, cb.circles[k].center) <=
          c.radius + cb.circles[k].radius + kContactTol)
        fail(Errc::BadParameters, "circles overlap");
  }
  return cb;
}

bool curved_contains(const CurvedBilliard& cb, Vec2 p, double tol) {
  if (tol >= 0.0) {
    if (!point_in_polygon(cb.outer, p, tol)) return false;
    for (const Circle& c : cb.circles)
      if (dist(p, c.center) < c.radius - tol) return false;
    return true;
  }
  double clear = -tol;
  if (!point_in_polygon(cb.outer, p, 0.0)) return false;
  for (int i = 0; i < cb.sides(); ++i) {
    auto [a, b] = cb.side(i);
    if (seg_dist(p, a, b) <= clear) return false;
  }
  for (const Circle& c : cb.circles)
    if (dist(p, c.center) <= c.radius + clear) return false;
  return true;
}

TraceResult trace(const CurvedBilliard& cb, Vec2 start, Vec2 direction, int max_bounces) {
  if (max_bounces <= 0) fail(Errc::BadParameters, "bounce budget must be positive");
  if (!curved_contains(cb, start, -kContactTol))
    fail(Errc::BadParameters, "trace start must be strictly inside the domain");
  Vec2 d = normalized(direction);
  TraceResult res;
  res.points.push_back(start);
  Vec2 p = start;
  for (int b = 0; b < max_bounces; ++b) {
    auto hit = first_hit(cb, p, d, kRayMin);
    if (!hit) break;  // numerically escaped; report the path so far
    res.points.push_back(hit->point);
    res.surfaces.push_back(hit->surface);
    if (hit->near_vertex) {
      res.corner_hit = true;
      break;
    }
    if (hit->grazing) {
      res.tangent_hit = true;
      break;
    }
    Vec2 n = surface_normal(cb, hit->surface, hit->point);
    d = reflect_dir(d, n);
    p = hit->point;
  }
  return res;
}

std::vector<Orbit> find_periodic_orbits(const CurvedBilliard& cb, int max_bounces,
                                        double max_length) {
  if (max_bounces < 2 || max_bounces > 8)
    fail(Errc::BadParameters, "bounce budget must be between 2 and 8");
  if (!(max_length > 0.0) || !std::isfinite(max_length))
    fail(Errc::BadParameters, "length budget must be positive and finite");
  auto sequences = canonical_sequences(cb.surfaces(), max_bounces);
  std::vector<std::vector<Orbit>> found(sequences.size());
  parallel_chunks(sequences.size(), [&](size_t, size_t begin, size_t end) {
    for (size_t si = begin; si < end; ++si) {
      const auto& seq = sequences[si];
      std::vector<Orbit> local;
      std::vector<CanonicalOrbit> local_keys;
      for (int seed = 0; seed < kSeedsPerSequence; ++seed) {
        std::vector<double> t = seed_params(cb, seq, seed);
        if (!newton_stationary(cb, seq, t)) continue;
        auto orbit = validate_orbit(cb, seq, t, max_length);
        if (!orbit) continue;
        auto key = canonical_orbit(*orbit);
        bool dup = false;
        for (size_t k = 0; k < local.size() && !dup; ++k)
          dup = same_orbit(cb, local[k], local_keys[k], *orbit, key);
        if (!dup) {
          local.push_back(std::move(*orbit));
          local_keys.push_back(std::move(key));
        }
      }
      found[si] = std::move(local);
    }
  });
  std::vector<Orbit> all;
  std::vector<CanonicalOrbit> keys;
  for (auto& bucket : found)
    for (auto& o : bucket) {
      auto key = canonical_orbit(o);
      bool dup = false;
      for (size_t k = 0; k < all.size() && !dup; ++k)
        dup = same_orbit(cb, all[k], keys[k], o, key);
      if (!dup) {
        all.push_back(std::move(o));
        keys.push_back(std::move(key));
      }
    }
  std::vector<size_t> order(all.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    if (std::abs(all[x].length - all[y].length) > 1e-9)
      return all[x].length < all[y].length;
    if (keys[x].seq != keys[y].seq) return keys[x].seq < keys[y].seq;
    for (size_t i = 0; i < keys[x].pts.size(); ++i) {
      auto qx = std::pair{llround(keys[x].pts[i].x * 1e7), llround(keys[x].pts[i].y * 1e7)};
      auto qy = std::pair{llround(keys[y].pts[i].x * 1e7), llround(keys[y].pts[i].y * 1e7)};
      if (qx != qy) return qx < qy;
    }
    return false;
  });
  std::vector<Orbit> out;
  out.reserve(all.size());
  for (size_t i : order) {
    // Canonical point order makes the reported orbit deterministic.
    all[i].points = keys[i].pts;
    all[i].surfaces = keys[i].seq;
    out.push_back(std::move(all[i]));
  }
  return out;
}

std::vector<Vec2> envelope_from_angles(const Circle& circle, std::vector<double> angles) {
  if (!(circle.radius > 0.0)) fail(Errc::BadParameters, "circle radius must be positive");
  for (double& a : angles) a = wrap_two_pi(a);
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               angles.end());
  while (angles.size() >= 2 && angles.back() - angles.front() > kTwoPi - 1e-12)
    angles.pop_back();
  if (angles.size() < 3)
    fail(Errc::BadParameters, "an envelope needs at least 3 distinct tangency angles");
  size_t n = angles.size();
  std::vector<Vec2> verts(n);
  for (size_t i = 0; i < n; ++i) {
    double cur = angles[i];
    double next = (i + 1 < n) ? angles[i + 1] : angles[0] + kTwoPi;
    double gap = next - cur;
    if (gap >= kPi - 1e-12)
      fail(Errc::AdjacentGapTooWide, "tangency gap reaches pi; tangents no longer close");
    double mid = cur + 0.5 * gap;
    verts[i] = circle.center + (circle.radius / std::cos(0.5 * gap)) * unit_dir(mid);
  }
  return verts;
}

std::vector<Vec2> envelope_polygon(const Circle& circle, const std::vector<Vec2>& points) {
  std::vector<double> angles;
  angles.reserve(points.size());
  for (Vec2 p : points) {
    double r = dist(p, circle.center);
    if (std::abs(r - circle.radius) > 1e-6 * std::max(1.0, circle.radius))
      fail(Errc::BadParameters, "tangency point is not on the circle");
    angles.push_back(std::atan2(p.y - circle.center.y, p.x - circle.center.x));
  }
  return envelope_from_angles(circle, angles);
}

ApproximationResult approximate_billiard(const CurvedBilliard& cb, int orbit_budget,
                                         int max_bounces) {
  if (orbit_budget < 3) fail(Errc::BadParameters, "orbit budget must be at least 3");
  if (cb.circles.empty()) fail(Errc::BadParameters, "no circular holes to replace");

  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (Vec2 v : cb.outer) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  double diam = std::hypot(xmax - xmin, ymax - ymin);

  std::vector<Orbit> hitting;
  double budget_len = 4.0 * diam;
  for (int attempt = 0; attempt < 5; ++attempt) {
    hitting.clear();
    for (auto& o : find_periodic_orbits(cb, max_bounces, budget_len))
      if (o.hits_circle) hitting.push_back(std::move(o));
    if (static_cast<int>(hitting.size()) >= orbit_budget) break;
    budget_len *= 2.0;
  }
  if (static_cast<int>(hitting.size()) < orbit_budget)
    fail(Errc::NoneFound, "not enough circle-hitting periodic orbits in the length budget");
  hitting.resize(static_cast<size_t>(orbit_budget));

  // Tangency angles per circle, merged within 2*pi/100.
  size_t ncirc = cb.circles.size();
  std::vector<std::vector<double>> raw(ncirc);
  for (const Orbit& o : hitting)
    for (size_t i = 0; i < o.points.size(); ++i)
      if (cb.is_circle_surface(o.surfaces[i])) {
        size_t j = static_cast<size_t>(o.surfaces[i] - cb.sides());
        Vec2 rel = o.points[i] - cb.circles[j].center;
        raw[j].push_back(std::atan2(rel.y, rel.x));
      }
  ApproximationResult res;
  res.tangent_angles.resize(ncirc);
  for (size_t j = 0; j < ncirc; ++j) {
    res.tangent_angles[j] = cluster_angles(raw[j], kTwoPi / 100.0);
    if (res.tangent_angles[j].size() < 3)
      fail(Errc::NoneFound, "fewer than 3 tangency directions on a circle");
  }

  // Widest tangency-free arc across the circles.
  res.beta_gap = 0.0;
  for (size_t j = 0; j < ncirc; ++j) {
    const auto& m = res.tangent_angles[j];
    for (size_t i = 0; i < m.size(); ++i) {
      double cur = m[i];
      double next = (i + 1 < m.size()) ? m[i + 1] : m[0] + kTwoPi;
      if (next - cur > res.beta_gap) {
        res.beta_gap = next - cur;
        res.beta_arc = {cur, next};
      }
    }
  }

  // Make every tangency direction rational (in units of pi).
  std::vector<std::vector<Rat>> frac(ncirc);
  bool exact = true;
  for (size_t j = 0; j < ncirc && exact; ++j)
    for (double a : res.tangent_angles[j]) {
      auto r = rat_from_double(a / kPi, 96, 1e-6);
      if (!r) {
        exact = false;
        break;
      }
      frac[j].push_back(*r);
    }
  if (exact) {
    res.snapped_exact = true;
    res.angle_bound = 0.0;
    int64_t z = 1;
    for (const auto& fj : frac)
      for (const Rat& f : fj) z = std::lcm(z, f.den);
    res.angle_Z = z;
  } else {
    res.snapped_exact = false;
    std::vector<double> values;
    for (size_t j = 0; j < ncirc; ++j)
      for (double a : res.tangent_angles[j]) values.push_back(wrap_two_pi(a) / kPi);
    int64_t N = 1000000;
    auto dir = dirichlet_approx(values, N);
    for (auto& fj : frac) fj.clear();
    size_t at = 0;
    for (size_t j = 0; j < ncirc; ++j)
      for (size_t i = 0; i < res.tangent_angles[j].size(); ++i)
        frac[j].push_back(Rat(dir.numerators[at++], dir.Z));
    res.angle_Z = dir.Z;
    res.angle_bound = kPi * dir.bound;
  }

  // Assemble the symbolic polygon-with-holes billiard.
  Basis basis;
  std::vector<std::vector<SymPoint>> polys;
  std::vector<SymPoint> outer_sym;
  for (Vec2 v : cb.outer)
    outer_sym.push_back({symbolize_value(v.x, basis), symbolize_value(v.y, basis)});
  polys.push_back(std::move(outer_sym));

  for (size_t j = 0; j < ncirc; ++j) {
    auto fs = frac[j];
    std::sort(fs.begin(), fs.end(), [](const Rat& a, const Rat& b) {
      return a.value() < b.value();
    });
    bool grid = true;
    for (size_t i = 0; i < fs.size(); ++i) {
      if (6 % fs[i].den != 0) grid = false;
      Rat gap = (i + 1 < fs.size() ? fs[i + 1] : fs[0] + Rat(2)) - fs[i];
      if (!(gap.value() < 1.0))
        fail(Errc::AdjacentGapTooWide, "tangency gap reaches pi after rationalization");
    }
    std::vector<SymPoint> hole;
    if (grid) {
      SymbolicCoord cx = symbolize_value(cb.circles[j].center.x, basis);
      SymbolicCoord cy = symbolize_value(cb.circles[j].center.y, basis);
      SymbolicCoord rr = symbolize_value(cb.circles[j].radius, basis);
      ensure_sqrt3_closure(basis);
      for (size_t i = 0; i < fs.size(); ++i) {
        Rat gap = (i + 1 < fs.size() ? fs[i + 1] : fs[0] + Rat(2)) - fs[i];
        Rat half = gap / Rat(2);
        auto cs = exact_cos_sin_pi(fs[i]);
        auto tn = (12 % half.den == 0) ? tan_pi_over_12(half.num * (12 / half.den))
                                       : std::nullopt;
        if (!cs || !tn) {
          grid = false;
          break;
        }
        Q3 ux = cs->first - *tn * cs->second;   // dir + tan * perp, x part
        Q3 uy = cs->second + *tn * cs->first;   // dir + tan * perp, y part
        SymbolicCoord vx = sym_add(cx, sym_scale_q3(rr, ux, basis));
        SymbolicCoord vy = sym_add(cy, sym_scale_q3(rr, uy, basis));
        if (!vx.exact || !vy.exact) {
          grid = false;
          break;
        }
        hole.push_back({std::move(vx), std::move(vy)});
      }
    }
    if (!grid) {
      hole.clear();
      std::vector<double> snapped;
      for (const Rat& f : fs) snapped.push_back(kPi * f.value());
      for (Vec2 v : envelope_from_angles(cb.circles[j], snapped))
        hole.push_back({symbolize_value(v.x, basis), symbolize_value(v.y, basis)});
    }
    polys.push_back(std::move(hole));
  }
  basis.auto_link();
  res.spec = make_billiard(std::move(basis), std::move(polys));
  return res;
}

}  // namespace billiard
