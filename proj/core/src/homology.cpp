#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numeric>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "billiard/epp.hpp"

// Rank of the period classes in the first homology of the glued surface.
//
// The computation runs in the dual picture: dual vertices are the 2C cells,
// dual edges are the side identifications plus hole cuts (one cut per hole
// per cell, so each cut cell is a disk), and dual faces are the vertex
// orbits, read off by walking a small loop around each identified corner.
// A period's class comes from the straight chord joining a boundary point of
// the laid-out pattern to its identified image; the chord lives in one chart,
// so it only crosses interior walls (zero-displacement identifications) and
// hole cuts. Where the chord would leave the pattern -- through a hole copy
// or past the outer boundary -- the loop follows a tight detour along that
// boundary component instead. The two ways around a component differ by the
// component's full winding loop, so every obstructing component also
// contributes its winding row; together the rows span the periods' class
// space independently of the detour choices. With R = spanning-tree rows of
// zero-displacement identifications plus the corner-walk face rows, the
// reported rank is rank([A; R]) - rank(R).

namespace billiard {

namespace {

// ---------------------------------------------------------------------------
// Small numeric helpers
// ---------------------------------------------------------------------------

double point_segment_dist(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = norm2(ab);
  if (len2 == 0.0) return dist(p, a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return dist(p, a + t * ab);
}

double seg_seg_dist(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  // Proper crossing means distance zero; otherwise the minimum is attained
  // at an endpoint against the other segment.
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return cross(q - p, r - p); };
  double o1 = orient(a, b, c), o2 = orient(a, b, d);
  double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != o2 && o3 != o4) return 0.0;
  return std::min(std::min(point_segment_dist(a, c, d), point_segment_dist(b, c, d)),
                  std::min(point_segment_dist(c, a, b), point_segment_dist(d, a, b)));
}

// ---------------------------------------------------------------------------
// Hole cuts
// ---------------------------------------------------------------------------

struct Cut {
  VertexId from;  // hole vertex
  VertexId to;    // anchor vertex on the outer boundary or an earlier hole
};

// Distance between two segments after trimming both away from a shared
// endpoint, so a transversal meeting at that endpoint does not count.
double trimmed_dist(Vec2 shared, Vec2 a_far, Vec2 b_far) {
  Vec2 a0 = shared + 0.05 * (a_far - shared);
  Vec2 b0 = shared + 0.05 * (b_far - shared);
  return seg_seg_dist(a0, a_far, b0, b_far);
}

bool cut_is_valid(const BilliardSpec& spec, const std::vector<Cut>& chosen, VertexId a, VertexId b) {
  Vec2 pa = spec.vertex_pt(a);
  Vec2 pb = spec.vertex_pt(b);
  double len = dist(pa, pb);
  if (len < kGeomTol) return false;

  // Against every polygon side: no contact except at a shared endpoint.
  for (int l = 0; l < static_cast<int>(spec.polygons.size()); ++l) {
    int n = spec.polygons[l].size();
    for (int j = 0; j < n; ++j) {
      VertexId v0{l, j}, v1{l, (j + 1) % n};
      bool share_a = (a == v0 || a == v1);
      bool share_b = (b == v0 || b == v1);
      Vec2 c = spec.vertex_pt(v0), d = spec.vertex_pt(v1);
      if (share_a && share_b) return false;  // cut would lie along a side
      if (share_a) {
        Vec2 shared = (a == v0) ? c : d;
        Vec2 side_far = (a == v0) ? d : c;
        if (trimmed_dist(shared, pb, side_far) < kGeomTol) return false;
      } else if (share_b) {
        Vec2 shared = (b == v0) ? c : d;
        Vec2 side_far = (b == v0) ? d : c;
        if (trimmed_dist(shared, pa, side_far) < kGeomTol) return false;
      } else {
        if (seg_seg_dist(pa, pb, c, d) < kGeomTol) return false;
      }
    }
  }

  // Against previously chosen cuts (anchor sharing allowed).
  for (const Cut& other : chosen) {
    Vec2 oc = spec.vertex_pt(other.from), od = spec.vertex_pt(other.to);
    bool share_a = (a == other.from || a == other.to);
    bool share_b = (b == other.from || b == other.to);
    if (share_a && share_b) return false;
    if (share_a) {
      Vec2 shared = (a == other.from) ? oc : od;
      Vec2 far = (a == other.from) ? od : oc;
      if (trimmed_dist(shared, pb, far) < kGeomTol) return false;
    } else if (share_b) {
      Vec2 shared = (b == other.from) ? oc : od;
      Vec2 far = (b == other.from) ? od : oc;
      if (trimmed_dist(shared, pa, far) < kGeomTol) return false;
    } else {
      if (seg_seg_dist(pa, pb, oc, od) < kGeomTol) return false;
    }
  }

  // Interior samples must stay strictly inside the domain.
  for (int s = 1; s < 64; ++s) {
    double t = static_cast<double>(s) / 64.0;
    Vec2 p = pa + t * (pb - pa);
    if (!point_in_domain(spec, p, kGeomTol)) return false;
    double clearance = 1e30;
    for (int l = 0; l < static_cast<int>(spec.polygons.size()); ++l) {
      int n = spec.polygons[l].size();
      for (int j = 0; j < n; ++j)
        clearance = std::min(clearance, point_segment_dist(p, spec.polygons[l].pts[j],
                                                           spec.polygons[l].pts[(j + 1) % n]));
    }
    if (clearance < 1e-8) return false;
  }
  return true;
}

// One straight visibility cut per hole, anchored at polygon corners, chosen
// deterministically (first valid candidate in lexicographic order).
std::vector<Cut> choose_cuts(const BilliardSpec& spec) {
  std::vector<Cut> cuts;
  for (int l = 1; l < static_cast<int>(spec.polygons.size()); ++l) {
    bool found = false;
    for (int va = 0; va < spec.polygons[l].size() && !found; ++va) {
      for (int lb = 0; lb < l && !found; ++lb) {
        for (int vb = 0; vb < spec.polygons[lb].size() && !found; ++vb) {
          VertexId a{l, va}, b{lb, vb};
          if (cut_is_valid(spec, cuts, a, b)) {
            cuts.push_back(Cut{a, b});
            found = true;
          }
        }
      }
    }
    if (!found)
      fail(Errc::BadParameters, "no straight corner-to-corner cut clears hole " + std::to_string(l));
  }
  return cuts;
}

// ---------------------------------------------------------------------------
// Corner ray tables
// ---------------------------------------------------------------------------

struct CornerRays {
  // Cut rays through this corner, sorted by angle inside the wedge:
  // (cut index, true when this corner is the cut's hole end).
  std::vector<std::pair<int, bool>> cuts;
  int slots = 1;  // wedge subdivisions = cuts + 1
};

double ray_angle(Vec2 from, Vec2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

double offset_mod_2pi(double angle, double base) {
  double two_pi = 2.0 * 3.14159265358979323846;
  double off = std::fmod(angle - base, two_pi);
  if (off < 0) off += two_pi;
  return off;
}

}  // namespace

// ---------------------------------------------------------------------------
// Main computation
// ---------------------------------------------------------------------------

namespace {

struct DualComplex {
  int cells = 0;
  int edge_count = 0;                    // pairings + cut copies
  std::vector<std::vector<Rat>> r_rows;  // tree rows + face rows
  std::vector<std::vector<Rat>> a_rows;  // one unit row per period
  int64_t orbit_count = 0;
};

int64_t rat_rank(std::vector<std::vector<Rat>> rows) {
  if (rows.empty()) return 0;
  size_t cols = rows[0].size();
  int64_t rank = 0;
  size_t pivot_row = 0;
  for (size_t col = 0; col < cols && pivot_row < rows.size(); ++col) {
    size_t sel = pivot_row;
    while (sel < rows.size() && rows[sel][col].is_zero()) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[sel], rows[pivot_row]);
    Rat inv = Rat(1) / rows[pivot_row][col];
    for (size_t c = col; c < cols; ++c) rows[pivot_row][c] *= inv;
    for (size_t r = 0; r < rows.size(); ++r) {
      if (r == pivot_row || rows[r][col].is_zero()) continue;
      Rat f = rows[r][col];
      for (size_t c = col; c < cols; ++c) rows[r][c] -= f * rows[pivot_row][c];
    }
    ++pivot_row;
    ++rank;
  }
  return rank;
}

// ---------------------------------------------------------------------------
// Period chord rows
// ---------------------------------------------------------------------------

// Even-odd ray cast against the outer polygon and every hole.
bool inside_billiard(const Epp& epp, Vec2 p) {
  bool in = false;
  for (const auto& poly : epp.internal_pts) {
    int n = static_cast<int>(poly.size());
    for (int j = 0; j < n; ++j) {
      Vec2 a = poly[static_cast<size_t>(j)];
      Vec2 b = poly[static_cast<size_t>((j + 1) % n)];
      if ((a.y > p.y) != (b.y > p.y)) {
        double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
        if (xint > p.x) in = !in;
      }
    }
  }
  return in;
}

// Builds signed crossing rows for period chords through the laid-out pattern
// (every copy at its own placement). Interior walls are the zero-displacement
// identifications, whose two copies coincide; the remaining identification
// copies form the pattern boundary, grouped into closed components. A chord
// joins a sampled side point to its identified image; portions that would
// leave the pattern are replaced by tight detours along the obstructing
// boundary component. Degenerate samples (corner grazes, parallel overlaps)
// report nothing and the caller retries with another sample or offset.
struct ChordTracer {
  const Epp& epp;
  const std::vector<Cut>& cuts;
  int n_pairings;
  int edge_count;

  ChordTracer(const Epp& e, const std::vector<Cut>& c, int np, int ec)
      : epp(e), cuts(c), n_pairings(np), edge_count(ec) {}

  struct WallSeg {
    int pairing;
    Vec2 a, b;
    Vec2 n_even;  // unit normal pointing into the even copy
  };
  struct CutSeg {
    int cell, cut;
    Vec2 a, b;
    double parity;  // +1 in even copies, -1 in odd ones
  };
  struct RimSeg {
    int pairing, cell;
    Vec2 a, b;
    int component = -1;
    int pos = -1;          // position in the component walk
    bool flipped = false;  // reversed relative to the walk direction
  };
  struct Component {
    std::vector<int> segs;     // rim indices in walk order
    std::vector<Vec2> corner;  // corner[i] = start of directed segment i
    std::vector<Vec2> inward;  // per directed segment: unit normal into the pattern
  };

  std::vector<WallSeg> walls;
  std::vector<CutSeg> cut_segs;
  std::vector<RimSeg> rims;
  std::vector<Component> comps;
  std::vector<int> even_rim;  // pairing -> rim index of its even copy (-1 for walls)
  double scale = 1.0;

  int cut_col(int cell, int cut) const {
    return n_pairings + cut * static_cast<int>(epp.cells.size()) + cell;
  }
  Vec2 cell_map(int c, Vec2 p) const { return epp.cells[static_cast<size_t>(c)].iso.apply(p); }
  Vec2 cell_lin(int c, Vec2 v) const { return epp.cells[static_cast<size_t>(c)].iso.linear(v); }
  Vec2 cell_inv(int c, Vec2 p) const {
    const Isometry& iso = epp.cells[static_cast<size_t>(c)].iso;
    return iso.linear_transposed(p - iso.t);
  }
  bool inside_pattern(Vec2 p) const {
    for (int c = 0; c < static_cast<int>(epp.cells.size()); ++c)
      if (inside_billiard(epp, cell_inv(c, p))) return true;
    return false;
  }

  void build() {
    const int cells = static_cast<int>(epp.cells.size());
    even_rim.assign(static_cast<size_t>(n_pairings), -1);

    for (const auto& poly : epp.internal_pts)
      for (const Vec2& p : poly) scale = std::max(scale, std::abs(p.x) + std::abs(p.y));

    for (int p = 0; p < n_pairings; ++p) {
      const Pairing& pr = epp.pairings[static_cast<size_t>(p)];
      const auto& pts = epp.internal_pts[static_cast<size_t>(pr.side.polygon)];
      int n = static_cast<int>(pts.size());
      Vec2 A = pts[static_cast<size_t>(pr.side.side)];
      Vec2 B = pts[static_cast<size_t>((pr.side.side + 1) % n)];
      // A pairing whose translation vanishes has coincident copies: it is an
      // interior wall of the chart whether it is a gluing arc or a period.
      if (pr.is_zero || norm(pr.period) <= 1e-9 * scale) {
        Vec2 mid = 0.5 * (A + B);
        Vec2 t = B - A;
        Vec2 n0 = (1.0 / norm(t)) * Vec2{-t.y, t.x};
        if (!inside_billiard(epp, mid + (1e-6 * scale) * n0)) n0 = Vec2{-n0.x, -n0.y};
        walls.push_back(WallSeg{p, cell_map(pr.even_cell, A), cell_map(pr.even_cell, B),
                                cell_lin(pr.even_cell, n0)});
      } else {
        even_rim[static_cast<size_t>(p)] = static_cast<int>(rims.size());
        rims.push_back(RimSeg{p, pr.even_cell, cell_map(pr.even_cell, A),
                              cell_map(pr.even_cell, B)});
        rims.push_back(
            RimSeg{p, pr.odd_cell, cell_map(pr.odd_cell, A), cell_map(pr.odd_cell, B)});
      }
    }
    for (int c = 0; c < cells; ++c)
      for (int t = 0; t < static_cast<int>(cuts.size()); ++t) {
        Vec2 cf = epp.internal_pts[cuts[static_cast<size_t>(t)].from.polygon]
                                  [cuts[static_cast<size_t>(t)].from.vertex];
        Vec2 ct = epp.internal_pts[cuts[static_cast<size_t>(t)].to.polygon]
                                  [cuts[static_cast<size_t>(t)].to.vertex];
        cut_segs.push_back(CutSeg{c, t, cell_map(c, cf), cell_map(c, ct),
                                  epp.cells[static_cast<size_t>(c)].odd ? -1.0 : 1.0});
      }

    // Group rim endpoints into nodes; every node must join exactly two rims.
    double node_tol = 1e-7 * scale;
    std::vector<Vec2> node_pt;
    std::vector<std::vector<int>> node_ends;  // rim * 2 + (0: at a, 1: at b)
    auto node_of = [&](Vec2 p) {
      for (int i = 0; i < static_cast<int>(node_pt.size()); ++i)
        if (dist(node_pt[static_cast<size_t>(i)], p) < node_tol) return i;
      node_pt.push_back(p);
      node_ends.emplace_back();
      return static_cast<int>(node_pt.size()) - 1;
    };
    std::vector<std::array<int, 2>> rim_node(rims.size());
    for (int r = 0; r < static_cast<int>(rims.size()); ++r) {
      rim_node[static_cast<size_t>(r)][0] = node_of(rims[static_cast<size_t>(r)].a);
      rim_node[static_cast<size_t>(r)][1] = node_of(rims[static_cast<size_t>(r)].b);
      node_ends[static_cast<size_t>(rim_node[static_cast<size_t>(r)][0])].push_back(2 * r);
      node_ends[static_cast<size_t>(rim_node[static_cast<size_t>(r)][1])].push_back(2 * r + 1);
    }
    for (const auto& ends : node_ends)
      if (ends.size() != 2)
        fail(Errc::UnpairedSide,
             "pattern boundary self-intersects (overlapping sheets): rank needs an embedded "
             "pattern");

    std::vector<char> used(rims.size(), 0);
    for (int r0 = 0; r0 < static_cast<int>(rims.size()); ++r0) {
      if (used[static_cast<size_t>(r0)]) continue;
      Component comp;
      int r = r0;
      bool flip = false;
      do {
        used[static_cast<size_t>(r)] = 1;
        RimSeg& rs = rims[static_cast<size_t>(r)];
        rs.component = static_cast<int>(comps.size());
        rs.pos = static_cast<int>(comp.segs.size());
        rs.flipped = flip;
        comp.segs.push_back(r);
        comp.corner.push_back(flip ? rs.b : rs.a);
        int exit_node = rim_node[static_cast<size_t>(r)][flip ? 0 : 1];
        const auto& ends = node_ends[static_cast<size_t>(exit_node)];
        int other = (ends[0] / 2 == r) ? ends[1] : ends[0];
        r = other / 2;
        flip = (other % 2 == 1);  // arriving at the next rim's b end reverses it
      } while (r != r0);
      int n = static_cast<int>(comp.segs.size());
      for (int i = 0; i < n; ++i) {
        Vec2 from = comp.corner[static_cast<size_t>(i)];
        Vec2 to = comp.corner[static_cast<size_t>((i + 1) % n)];
        Vec2 t = to - from;
        Vec2 n0 = (1.0 / norm(t)) * Vec2{-t.y, t.x};
        // Sample off-center too: a probe can land on interior structure,
        // where the even-odd cast is unreliable. Overlapping sheets report
        // inside on both sides at every sample and are rejected.
        bool oriented = false, pos_in = false;
        for (double f : {0.5, 0.38196601125010515, 0.6909830056250526}) {
          Vec2 at = from + f * t;
          bool pi = inside_pattern(at + (1e-6 * scale) * n0);
          bool ni = inside_pattern(at - (1e-6 * scale) * n0);
          if (pi != ni) {
            oriented = true;
            pos_in = pi;
            break;
          }
        }
        if (!oriented)
          fail(Errc::UnpairedSide,
               "pattern boundary segment has interior on both sides (overlapping sheets): rank "
               "needs an embedded pattern");
        comp.inward.push_back(pos_in ? n0 : Vec2{-n0.x, -n0.y});
      }
      comps.push_back(std::move(comp));
    }
  }

  // Adds the signed wall and cut crossings of one straight leg to the row.
  // False on a degeneracy: a crossing at a leg end, a corner graze, a
  // near-parallel overlap, or (when enabled) contact with a boundary rim.
  bool sweep_leg(Vec2 p, Vec2 q, std::vector<Rat>& row, bool check_rims) const {
    Vec2 pq = q - p;
    double len = norm(pq);
    if (len < 1e-12) return true;
    Vec2 d = (1.0 / len) * pq;
    // 1 crossing, 0 none, -1 degenerate
    auto classify = [&](Vec2 a, Vec2 b, double& whit) {
      Vec2 ab = b - a;
      double ablen = norm(ab);
      double denom = cross(d, ab);
      if (std::abs(denom) < 1e-12 * ablen) {
        if (std::abs(cross(a - p, d)) < 1e-9 * scale) {
          double t0 = dot(a - p, d), t1 = dot(b - p, d);
          if (std::max(std::min(t0, t1), 0.0) <= std::min(std::max(t0, t1), len) + 1e-9)
            return -1;
        }
        return 0;
      }
      double s = cross(a - p, ab) / denom;
      double w = cross(a - p, d) / denom;
      if (s < -1e-9 || s > len + 1e-9 || w < -1e-9 || w > 1.0 + 1e-9) return 0;
      if (s < 1e-9 || s > len - 1e-9) return -1;
      if (std::min(w, 1.0 - w) * ablen < 1e-7 * scale) return -1;
      whit = w;
      return 1;
    };
    double w;
    for (const WallSeg& ws : walls) {
      int c = classify(ws.a, ws.b, w);
      if (c < 0) return false;
      if (c > 0)
        row[static_cast<size_t>(ws.pairing)] += Rat(dot(d, ws.n_even) < 0 ? 1 : -1);
    }
    for (const CutSeg& cs : cut_segs) {
      int c = classify(cs.a, cs.b, w);
      if (c < 0) return false;
      if (c > 0)
        row[static_cast<size_t>(cut_col(cs.cell, cs.cut))] +=
            Rat(cs.parity * cross(cs.b - cs.a, d) > 0 ? 1 : -1);
    }
    if (check_rims) {
      for (const RimSeg& rs : rims) {
        Vec2 ab = rs.b - rs.a;
        double denom = cross(d, ab);
        if (std::abs(denom) < 1e-12 * norm(ab)) continue;
        double s = cross(rs.a - p, ab) / denom;
        double wr = cross(rs.a - p, d) / denom;
        if (s > 1e-9 && s < len - 1e-9 && wr > -1e-9 && wr < 1.0 + 1e-9) return false;
      }
    }
    return true;
  }

  // Tight detour from p1 (on rim r1, side parameter w1) to p2 (on rim r2, w2)
  // along their common boundary component, offset into the pattern by delta.
  std::optional<std::vector<Vec2>> detour(int r1, double w1, Vec2 p1, int r2, double w2,
                                          Vec2 p2, double delta) const {
    const RimSeg& s1 = rims[static_cast<size_t>(r1)];
    const RimSeg& s2 = rims[static_cast<size_t>(r2)];
    const Component& K = comps[static_cast<size_t>(s1.component)];
    int n = static_cast<int>(K.segs.size());
    int pos1 = s1.pos, pos2 = s2.pos;
    double t1 = s1.flipped ? 1.0 - w1 : w1;
    double t2 = s2.flipped ? 1.0 - w2 : w2;
    std::vector<Vec2> pts{p1, p1 + delta * K.inward[static_cast<size_t>(pos1)]};
    if (!(pos1 == pos2 && t2 >= t1)) {
      int i = pos1;
      do {
        int next = (i + 1) % n;
        Vec2 c = K.corner[static_cast<size_t>(next)];
        if (dist(p1, c) < 5.0 * delta || dist(p2, c) < 5.0 * delta) return std::nullopt;
        Vec2 n1 = K.inward[static_cast<size_t>(i)];
        Vec2 n2 = K.inward[static_cast<size_t>(next)];
        Vec2 bis{n1.x + n2.x, n1.y + n2.y};
        double bl = norm(bis);
        if (bl < 0.4) return std::nullopt;  // near-reversal corner
        pts.push_back(c + (delta / (0.5 * bl * bl)) * bis);
        i = next;
      } while (i != pos2);
    }
    pts.push_back(p2 + delta * K.inward[static_cast<size_t>(pos2)]);
    pts.push_back(p2);
    return pts;
  }

  struct ChordResult {
    std::vector<Rat> row;
    std::vector<int> obstructed;  // boundary components detoured around
  };

  // Signed crossing row of the closed-up loop of one nonzero identification,
  // sampled at side parameter tpar with detour offset delta.
  std::optional<ChordResult> try_chord(int pairing_index, double tpar, double delta) const {
    const Pairing& pr = epp.pairings[static_cast<size_t>(pairing_index)];
    const auto& pts = epp.internal_pts[static_cast<size_t>(pr.side.polygon)];
    int nside = static_cast<int>(pts.size());
    Vec2 A = pts[static_cast<size_t>(pr.side.side)];
    Vec2 B = pts[static_cast<size_t>((pr.side.side + 1) % nside)];
    Vec2 a_int = A + tpar * (B - A);
    Vec2 a = cell_map(pr.even_cell, a_int);
    Vec2 b = cell_map(pr.odd_cell, a_int);
    double L = dist(a, b);
    if (L < 1e-12) return std::nullopt;
    Vec2 d = (1.0 / L) * (b - a);

    // Boundary contacts strictly between the chord endpoints.
    struct RimHit {
      double s;
      int rim;
      double w;
    };
    std::vector<RimHit> hits;
    for (int k = 0; k < static_cast<int>(rims.size()); ++k) {
      const RimSeg& rs = rims[static_cast<size_t>(k)];
      Vec2 ab = rs.b - rs.a;
      double ablen = norm(ab);
      double denom = cross(d, ab);
      if (std::abs(denom) < 1e-12 * ablen) {
        if (std::abs(cross(rs.a - a, d)) < 1e-9 * scale) {
          double t0 = dot(rs.a - a, d), t1 = dot(rs.b - a, d);
          if (std::max(std::min(t0, t1), 0.0) <= std::min(std::max(t0, t1), L) + 1e-9)
            return std::nullopt;
        }
        continue;
      }
      double s = cross(rs.a - a, ab) / denom;
      double w = cross(rs.a - a, d) / denom;
      if (s < 1e-9 || s > L - 1e-9 || w < -1e-9 || w > 1.0 + 1e-9) continue;
      if (std::min(w, 1.0 - w) * ablen < 1e-7 * scale) return std::nullopt;
      hits.push_back(RimHit{s, k, w});
    }
    std::sort(hits.begin(), hits.end(), [](const RimHit& x, const RimHit& y) { return x.s < y.s; });
    for (size_t i = 1; i < hits.size(); ++i)
      if (hits[i].s - hits[i - 1].s < 1e-9) return std::nullopt;

    // Classify the intervals between contacts, and seed the chord endpoints
    // as contacts on the traced identification's own copies.
    RimHit first{0.0, even_rim[static_cast<size_t>(pairing_index)], tpar};
    RimHit last{L, even_rim[static_cast<size_t>(pairing_index)] + 1, tpar};
    std::vector<RimHit> stops;
    stops.push_back(first);
    stops.insert(stops.end(), hits.begin(), hits.end());
    stops.push_back(last);

    std::vector<Rat> row(static_cast<size_t>(edge_count), Rat(0));
    std::vector<int> obstructed;
    bool prev_inside = false, have_prev = false;
    for (size_t i = 0; i + 1 < stops.size(); ++i) {
      double s0 = stops[i].s, s1 = stops[i + 1].s;
      if (s1 - s0 < 1e-8) return std::nullopt;
      // Probe off-center as well: in a symmetric pattern the exact midpoint
      // can sit on an interior wall, where the even-odd cast is unreliable.
      bool in = false;
      for (double f : {0.5, 0.38196601125010515, 0.6909830056250526})
        if (inside_pattern(a + (s0 + f * (s1 - s0)) * d)) {
          in = true;
          break;
        }
      if (have_prev && in == prev_inside) return std::nullopt;
      prev_inside = in;
      have_prev = true;
      Vec2 p0 = (i == 0) ? a : a + s0 * d;
      Vec2 p1 = (i + 2 == stops.size()) ? b : a + s1 * d;
      if (in) {
        if (!sweep_leg(p0, p1, row, false)) return std::nullopt;
      } else {
        const RimSeg& r0 = rims[static_cast<size_t>(stops[i].rim)];
        const RimSeg& r1 = rims[static_cast<size_t>(stops[i + 1].rim)];
        if (r0.component != r1.component) return std::nullopt;
        auto path = detour(stops[i].rim, stops[i].w, p0, stops[i + 1].rim, stops[i + 1].w,
                           p1, delta);
        if (!path) return std::nullopt;
        for (size_t j = 0; j + 1 < path->size(); ++j)
          if (!sweep_leg((*path)[j], (*path)[j + 1], row, true)) return std::nullopt;
        obstructed.push_back(r0.component);
      }
    }

    // The loop closes through the identification itself, crossing it from the
    // odd copy back to the even one; normalize so that entry is +1.
    row[static_cast<size_t>(pairing_index)] -= Rat(1);
    for (auto& x : row) x = -x;
    return ChordResult{std::move(row), std::move(obstructed)};
  }

  // Full winding loop around one boundary component, offset by delta.
  std::optional<std::vector<Rat>> winding_row(int comp_idx, double delta) const {
    const Component& K = comps[static_cast<size_t>(comp_idx)];
    int n = static_cast<int>(K.segs.size());
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) {
      int next = (i + 1) % n;
      Vec2 n1 = K.inward[static_cast<size_t>(i)];
      Vec2 n2 = K.inward[static_cast<size_t>(next)];
      Vec2 bis{n1.x + n2.x, n1.y + n2.y};
      double bl = norm(bis);
      if (bl < 0.4) return std::nullopt;
      pts.push_back(K.corner[static_cast<size_t>(next)] + (delta / (0.5 * bl * bl)) * bis);
    }
    pts.push_back(pts.front());
    std::vector<Rat> row(static_cast<size_t>(edge_count), Rat(0));
    for (size_t j = 0; j + 1 < pts.size(); ++j)
      if (!sweep_leg(pts[j], pts[j + 1], row, true)) return std::nullopt;
    return row;
  }
};

DualComplex build_dual_complex(const Epp& epp) {
  const BilliardSpec& spec = epp.spec;
  const int n_poly = static_cast<int>(spec.polygons.size());
  const int cells = static_cast<int>(epp.cells.size());
  const int n_pairings = static_cast<int>(epp.pairings.size());

  std::vector<Cut> cuts = choose_cuts(spec);
  const int n_cuts = static_cast<int>(cuts.size());
  const int edge_count = n_pairings + n_cuts * cells;
  auto cut_col = [&](int cell, int cut) { return n_pairings + cut * cells + cell; };

  // Linear indexing of base-level corners.
  std::vector<int> vtx_offset(n_poly + 1, 0);
  for (int l = 0; l < n_poly; ++l) vtx_offset[l + 1] = vtx_offset[l] + spec.polygons[l].size();
  const int n_corner = vtx_offset[n_poly];
  auto vtx_lin = [&](VertexId v) { return vtx_offset[v.polygon] + v.vertex; };

  // Ray tables per base corner.
  std::vector<CornerRays> rays(static_cast<size_t>(n_corner));
  for (int l = 0; l < n_poly; ++l) {
    int n = spec.polygons[l].size();
    for (int v = 0; v < n; ++v) {
      const auto& pts = epp.internal_pts[l];
      Vec2 at = pts[v];
      double out_dir = ray_angle(at, pts[(v + 1) % n]);
      double wedge = spec.angle[l][v].value() * 3.14159265358979323846;
      CornerRays& cr = rays[static_cast<size_t>(vtx_lin({l, v}))];
      for (int t = 0; t < n_cuts; ++t) {
        VertexId other;
        bool at_from;
        if (cuts[t].from == VertexId{l, v}) {
          other = cuts[t].to;
          at_from = true;
        } else if (cuts[t].to == VertexId{l, v}) {
          other = cuts[t].from;
          at_from = false;
        } else {
          continue;
        }
        Vec2 target = epp.internal_pts[other.polygon][other.vertex];
        double off = offset_mod_2pi(ray_angle(at, target), out_dir);
        if (off <= 1e-9 || off >= wedge - 1e-9)
          fail(Errc::BadParameters, "cut ray leaves its corner wedge");
        cr.cuts.emplace_back(t, at_from);
      }
      std::sort(cr.cuts.begin(), cr.cuts.end(), [&](const auto& x, const auto& y) {
        VertexId ox = x.second ? cuts[x.first].to : cuts[x.first].from;
        VertexId oy = y.second ? cuts[y.first].to : cuts[y.first].from;
        double ax = offset_mod_2pi(ray_angle(at, epp.internal_pts[ox.polygon][ox.vertex]), out_dir);
        double ay = offset_mod_2pi(ray_angle(at, epp.internal_pts[oy.polygon][oy.vertex]), out_dir);
        return ax < ay;
      });
      cr.slots = static_cast<int>(cr.cuts.size()) + 1;
    }
  }

  // Pairing lookup by (side, cell) for each parity.
  std::vector<int> side_offset(n_poly + 1, 0);
  for (int l = 0; l < n_poly; ++l) side_offset[l + 1] = side_offset[l] + spec.polygons[l].size();
  auto side_lin = [&](int l, int j) { return side_offset[l] + j; };
  std::vector<int> by_even(static_cast<size_t>(side_offset[n_poly]) * cells, -1);
  std::vector<int> by_odd(static_cast<size_t>(side_offset[n_poly]) * cells, -1);
  for (int p = 0; p < n_pairings; ++p) {
    const Pairing& pr = epp.pairings[static_cast<size_t>(p)];
    int s = side_lin(pr.side.polygon, pr.side.side);
    by_even[static_cast<size_t>(s) * cells + pr.even_cell] = p;
    by_odd[static_cast<size_t>(s) * cells + pr.odd_cell] = p;
  }

  // Walk a small surface loop around every identified corner; each walk emits
  // one dual face row (signed edge crossings).
  struct State {
    int cell, vtx, slot;
    bool operator==(const State&) const = default;
  };
  std::vector<std::vector<char>> visited(static_cast<size_t>(cells));
  for (int c = 0; c < cells; ++c) {
    int total = 0;
    for (int vx = 0; vx < n_corner; ++vx) total += rays[static_cast<size_t>(vx)].slots;
    visited[static_cast<size_t>(c)].assign(static_cast<size_t>(total), 0);
  }
  std::vector<int> slot_base(static_cast<size_t>(n_corner), 0);
  for (int vx = 1; vx < n_corner; ++vx)
    slot_base[static_cast<size_t>(vx)] =
        slot_base[static_cast<size_t>(vx - 1)] + rays[static_cast<size_t>(vx - 1)].slots;

  auto seen = [&](const State& s) -> char& {
    return visited[static_cast<size_t>(s.cell)]
                  [static_cast<size_t>(slot_base[static_cast<size_t>(s.vtx)] + s.slot)];
  };

  std::vector<std::vector<Rat>> face_rows;
  int64_t orbit_count = 0;
  std::vector<int> poly_of_vtx(static_cast<size_t>(n_corner));
  std::vector<int> idx_of_vtx(static_cast<size_t>(n_corner));
  for (int l = 0; l < n_poly; ++l)
    for (int v = 0; v < spec.polygons[l].size(); ++v) {
      poly_of_vtx[static_cast<size_t>(vtx_lin({l, v}))] = l;
      idx_of_vtx[static_cast<size_t>(vtx_lin({l, v}))] = v;
    }

  for (int c0 = 0; c0 < cells; ++c0) {
    for (int vx0 = 0; vx0 < n_corner; ++vx0) {
      for (int s0 = 0; s0 < rays[static_cast<size_t>(vx0)].slots; ++s0) {
        State start{c0, vx0, s0};
        if (seen(start)) continue;
        std::vector<Rat> row(static_cast<size_t>(edge_count), Rat(0));
        Vec2 holonomy{0.0, 0.0};
        State s = start;
        do {
          seen(s) = 1;
          const CornerRays& cr = rays[static_cast<size_t>(s.vtx)];
          int l = poly_of_vtx[static_cast<size_t>(s.vtx)];
          int v = idx_of_vtx[static_cast<size_t>(s.vtx)];
          int n = spec.polygons[l].size();
          bool odd = epp.cells[static_cast<size_t>(s.cell)].odd;
          if (!odd) {
            int crossing = s.slot + 1;  // even copies sweep rays upward
            if (crossing <= cr.slots - 1) {
              auto [cut_idx, at_from] = cr.cuts[static_cast<size_t>(crossing - 1)];
              int sign = at_from ? 1 : -1;
              row[static_cast<size_t>(cut_col(s.cell, cut_idx))] += Rat(sign);
              s.slot = crossing;
            } else {
              int jprev = (v - 1 + n) % n;
              int p = by_even[static_cast<size_t>(side_lin(l, jprev)) * cells + s.cell];
              row[static_cast<size_t>(p)] += Rat(1);
              holonomy = holonomy + epp.pairings[static_cast<size_t>(p)].period;
              s.cell = epp.pairings[static_cast<size_t>(p)].odd_cell;
              s.slot = cr.slots - 1;
            }
          } else {
            int crossing = s.slot;  // odd copies sweep rays downward
            if (crossing >= 1) {
              auto [cut_idx, at_from] = cr.cuts[static_cast<size_t>(crossing - 1)];
              int sign = at_from ? -1 : 1;
              row[static_cast<size_t>(cut_col(s.cell, cut_idx))] += Rat(sign);
              s.slot = crossing - 1;
            } else {
              int p = by_odd[static_cast<size_t>(side_lin(l, v)) * cells + s.cell];
              row[static_cast<size_t>(p)] -= Rat(1);
              holonomy = holonomy - epp.pairings[static_cast<size_t>(p)].period;
              s.cell = epp.pairings[static_cast<size_t>(p)].even_cell;
              s.slot = 0;
            }
          }
        } while (!(s == start));
        if (norm(holonomy) > 1e-6)
          fail(Errc::UnpairedSide, "corner loop around a vertex orbit has nonzero holonomy");
        face_rows.push_back(std::move(row));
        ++orbit_count;
      }
    }
  }

  // Every dual edge is crossed exactly twice, with opposite signs.
  for (int e = 0; e < edge_count; ++e) {
    Rat sum(0);
    for (const auto& row : face_rows) sum += row[static_cast<size_t>(e)];
    if (!sum.is_zero())
      fail(Errc::UnpairedSide, "inconsistent crossing orientations in the corner walk");
  }

  // Spanning tree of the dual graph over zero-displacement identifications.
  std::vector<int> reached(static_cast<size_t>(cells), 0);
  reached[0] = 1;
  std::deque<int> queue{0};
  std::vector<int> tree_edges;
  while (!queue.empty()) {
    int c = queue.front();
    queue.pop_front();
    for (int p = 0; p < n_pairings; ++p) {
      const Pairing& pr = epp.pairings[static_cast<size_t>(p)];
      if (!pr.is_zero) continue;
      int other = -1;
      if (pr.even_cell == c && !reached[static_cast<size_t>(pr.odd_cell)]) other = pr.odd_cell;
      if (pr.odd_cell == c && !reached[static_cast<size_t>(pr.even_cell)]) other = pr.even_cell;
      if (other >= 0) {
        reached[static_cast<size_t>(other)] = 1;
        tree_edges.push_back(p);
        queue.push_back(other);
      }
    }
  }
  for (int c = 0; c < cells; ++c)
    if (!reached[static_cast<size_t>(c)])
      fail(Errc::NoGluingSide, "zero-displacement identifications do not connect all copies");

  DualComplex dc;
  dc.cells = cells;
  dc.edge_count = edge_count;
  dc.orbit_count = orbit_count;
  dc.r_rows.reserve(tree_edges.size() + face_rows.size());
  for (int p : tree_edges) {
    std::vector<Rat> row(static_cast<size_t>(edge_count), Rat(0));
    row[static_cast<size_t>(p)] = Rat(1);
    dc.r_rows.push_back(std::move(row));
  }
  for (auto& row : face_rows) dc.r_rows.push_back(std::move(row));
  ChordTracer tracer{epp, cuts, n_pairings, edge_count};
  tracer.build();
  constexpr double kSideParams[] = {0.5,      0.375,    0.6171875, 0.28125,
                                    0.703125, 0.4375,   0.5625,    0.34375,
                                    0.296875, 0.671875, 0.53125,   0.46875};
  constexpr double kOffsets[] = {1e-4, 2.2e-5, 5e-6};
  std::set<int> obstructed;
  for (const Period& per : epp.periods) {
    if (tracer.even_rim[static_cast<size_t>(per.pairing)] < 0) {
      // The twin copies coincide: the chord is trivial and the class is the
      // pairing's own dual edge.
      std::vector<Rat> row(static_cast<size_t>(edge_count), Rat(0));
      row[static_cast<size_t>(per.pairing)] = Rat(1);
      dc.a_rows.push_back(std::move(row));
      continue;
    }
    std::optional<ChordTracer::ChordResult> res;
    for (double tpar : kSideParams) {
      for (double off : kOffsets) {
        res = tracer.try_chord(per.pairing, tpar, off * tracer.scale);
        if (res) break;
      }
      if (res) break;
    }
    if (!res) fail(Errc::BadParameters, "period chord keeps meeting corners");
    obstructed.insert(res->obstructed.begin(), res->obstructed.end());
    dc.a_rows.push_back(std::move(res->row));
  }
  for (int k : obstructed) {
    std::optional<std::vector<Rat>> row;
    for (double off : kOffsets) {
      row = tracer.winding_row(k, off * tracer.scale);
      if (row) break;
    }
    if (!row) fail(Errc::BadParameters, "boundary winding loop keeps meeting corners");
    dc.a_rows.push_back(std::move(*row));
  }
  return dc;
}

}  // namespace

HomologyReport homology_report(const Epp& epp) {
  DualComplex dc = build_dual_complex(epp);

  int64_t rank_r = rat_rank(dc.r_rows);
  std::vector<std::vector<Rat>> all = dc.a_rows;
  for (const auto& row : dc.r_rows) all.push_back(row);
  int64_t rank_all = rat_rank(std::move(all));

  // Cross-check the complex against the angle-data Euler counts: the face
  // relations must leave exactly a genus-g surface's worth of classes.
  GenusReport genus = compute_genus(epp.spec);
  if (dc.edge_count - rank_r != 2 * genus.genus)
    fail(Errc::UnpairedSide, "homology dimension disagrees with the Euler characteristic");

  HomologyReport rep;
  rep.rank = rank_all - rank_r;
  rep.vertex_orbits = dc.orbit_count;
  rep.edges = dc.edge_count;
  rep.faces = dc.cells;
  return rep;
}

int64_t integer_rank(const Epp& epp) { return homology_report(epp).rank; }

}  // namespace billiard
