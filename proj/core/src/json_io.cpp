#include "billiard/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "billiard/errors.hpp"

#include "json.hpp"

namespace billiard {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json coord_to_json(const SymbolicCoord& c) {
  ordered_json j;
  if (!c.exact) {
    j["value"] = c.value;
    return j;
  }
  j["rat"] = ordered_json::array({c.rat.num, c.rat.den});
  ordered_json terms = ordered_json::array();
  for (const auto& [idx, coeff] : c.terms)
    terms.push_back(ordered_json::array(
        {ordered_json::array({coeff.num, coeff.den}), idx}));
  j["terms"] = std::move(terms);
  return j;
}

Rat rat_from_json(const ordered_json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    fail(Errc::BadParameters, "rational must be a [num, den] integer pair");
  return Rat(j[0].get<int64_t>(), j[1].get<int64_t>());
}

SymbolicCoord coord_from_json(const ordered_json& j, const Basis& basis) {
  if (!j.is_object()) fail(Errc::BadParameters, "coordinate must be an object");
  if (j.contains("value")) {
    if (!j["value"].is_number()) fail(Errc::BadParameters, "coordinate value must be a number");
    return SymbolicCoord::inexact(j["value"].get<double>());
  }
  if (!j.contains("rat") || !j.contains("terms"))
    fail(Errc::BadParameters, "coordinate needs rat and terms (or value)");
  SymbolicCoord c;
  c.rat = rat_from_json(j["rat"]);
  for (const auto& t : j["terms"]) {
    if (!t.is_array() || t.size() != 2 || !t[1].is_number_integer())
      fail(Errc::BadParameters, "coordinate term must be [[num,den], atom]");
    int idx = t[1].get<int>();
    if (idx < 0 || idx >= static_cast<int>(basis.size()))
      fail(Errc::UnknownBasisIndex, "term references basis atom " + std::to_string(idx));
    c.terms.emplace_back(idx, rat_from_json(t[0]));
  }
  c.normalize();
  c.value = evaluate_symbolic(c, basis);
  return c;
}

ordered_json point_to_json(const SymPoint& p) {
  ordered_json j;
  j["x"] = coord_to_json(p.x);
  j["y"] = coord_to_json(p.y);
  return j;
}

SymPoint point_from_json(const ordered_json& j, const Basis& basis) {
  if (!j.is_object() || !j.contains("x") || !j.contains("y"))
    fail(Errc::BadParameters, "point must be an object with x and y");
  return {coord_from_json(j["x"], basis), coord_from_json(j["y"], basis)};
}

ordered_json parse_checked(const std::string& text) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Errc::BadParameters, "malformed JSON document");
  if (!j.is_object()) fail(Errc::BadParameters, "top-level JSON must be an object");
  if (!j.contains("schema") || j["schema"] != "v1")
    fail(Errc::BadParameters, "unsupported or missing schema (expected \"v1\")");
  return j;
}

}  // namespace

std::string spec_to_json(const BilliardSpec& spec) {
  ordered_json j;
  j["schema"] = "v1";
  ordered_json basis = ordered_json::array();
  for (const BasisAtom& a : spec.basis.atoms) {
    ordered_json atom;
    atom["name"] = a.name;
    atom["value"] = a.value;
    basis.push_back(std::move(atom));
  }
  j["basis"] = std::move(basis);
  ordered_json outer = ordered_json::array();
  for (const SymPoint& p : spec.polygons[0].vertices) outer.push_back(point_to_json(p));
  j["outer"] = std::move(outer);
  ordered_json holes = ordered_json::array();
  for (size_t i = 1; i < spec.polygons.size(); ++i) {
    ordered_json hole = ordered_json::array();
    for (const SymPoint& p : spec.polygons[i].vertices) hole.push_back(point_to_json(p));
    holes.push_back(std::move(hole));
  }
  j["holes"] = std::move(holes);
  return j.dump(2) + "\n";
}

BilliardSpec spec_from_json(const std::string& text) {
  ordered_json j = parse_checked(text);
  if (!j.contains("outer") || !j["outer"].is_array())
    fail(Errc::BadParameters, "spec needs an outer polygon");
  Basis basis;
  if (j.contains("basis")) {
    if (!j["basis"].is_array()) fail(Errc::BadParameters, "basis must be an array");
    for (const auto& a : j["basis"]) {
      if (!a.is_object() || !a.contains("name") || !a.contains("value"))
        fail(Errc::BadParameters, "basis atom needs name and value");
      basis.find_or_add(a["name"].get<std::string>(), a["value"].get<double>());
    }
  }
  std::vector<std::vector<SymPoint>> polys;
  std::vector<SymPoint> outer;
  for (const auto& p : j["outer"]) outer.push_back(point_from_json(p, basis));
  polys.push_back(std::move(outer));
  if (j.contains("holes")) {
    if (!j["holes"].is_array()) fail(Errc::BadParameters, "holes must be an array");
    for (const auto& hj : j["holes"]) {
      if (!hj.is_array()) fail(Errc::BadParameters, "each hole must be a vertex array");
      std::vector<SymPoint> hole;
      for (const auto& p : hj) hole.push_back(point_from_json(p, basis));
      polys.push_back(std::move(hole));
    }
  }
  return make_billiard(std::move(basis), std::move(polys));
}

std::string curved_to_json(const CurvedBilliard& cb) {
  ordered_json j;
  j["schema"] = "v1";
  ordered_json outer = ordered_json::array();
  for (Vec2 v : cb.outer) outer.push_back(ordered_json::array({v.x, v.y}));
  j["outer"] = std::move(outer);
  ordered_json circles = ordered_json::array();
  for (const Circle& c : cb.circles) {
    ordered_json cj;
    cj["center"] = ordered_json::array({c.center.x, c.center.y});
    cj["radius"] = c.radius;
    circles.push_back(std::move(cj));
  }
  j["circles"] = std::move(circles);
  return j.dump(2) + "\n";
}

CurvedBilliard curved_from_json(const std::string& text) {
  ordered_json j = parse_checked(text);
  if (!j.contains("outer") || !j["outer"].is_array())
    fail(Errc::BadParameters, "curved billiard needs an outer polygon");
  std::vector<Vec2> outer;
  for (const auto& v : j["outer"]) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      fail(Errc::BadParameters, "outer vertex must be an [x, y] pair");
    outer.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  std::vector<Circle> circles;
  if (j.contains("circles")) {
    if (!j["circles"].is_array()) fail(Errc::BadParameters, "circles must be an array");
    for (const auto& cj : j["circles"]) {
      if (!cj.is_object() || !cj.contains("center") || !cj.contains("radius"))
        fail(Errc::BadParameters, "circle needs center and radius");
      const auto& ce = cj["center"];
      if (!ce.is_array() || ce.size() != 2)
        fail(Errc::BadParameters, "circle center must be an [x, y] pair");
      circles.push_back(Circle{{ce[0].get<double>(), ce[1].get<double>()},
                               cj["radius"].get<double>()});
    }
  }
  return make_curved(std::move(outer), std::move(circles));
}

bool json_is_curved(const std::string& text) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  return j.is_object() && j.contains("circles");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::EmptyInput, "cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::EmptyInput, "cannot write file: " + path);
  out << text;
  if (!out) fail(Errc::EmptyInput, "failed writing file: " + path);
}

BilliardSpec load_spec_file(const std::string& path) {
  return spec_from_json(read_text_file(path));
}

CurvedBilliard load_curved_file(const std::string& path) {
  return curved_from_json(read_text_file(path));
}

void write_field_csv(const std::string& path, const ScalarField& field) {
  std::ostringstream out;
  out << "x,y,re,im,abs\n";
  char buf[160];
  for (int iy = 0; iy < field.ny; ++iy)
    for (int ix = 0; ix < field.nx; ++ix) {
      size_t at = static_cast<size_t>(iy) * field.nx + ix;
      if (!field.mask[at]) continue;
      Vec2 p = field.point(ix, iy);
      std::complex<double> v = field.values[at];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.x, p.y,
                    v.real(), v.imag(), std::abs(v));
      out << buf;
    }
  write_text_file(path, out.str());
}

void write_field_pgm(const std::string& path, const ScalarField& field) {
  double peak = 0.0;
  for (size_t i = 0; i < field.values.size(); ++i)
    if (field.mask[i]) peak = std::max(peak, std::abs(field.values[i]));
  if (peak <= 0.0) peak = 1.0;
  std::ostringstream out;
  out << "P5\n" << field.nx << " " << field.ny << "\n255\n";
  // PGM rows run top to bottom; the grid's y axis points up.
  for (int iy = field.ny - 1; iy >= 0; --iy)
    for (int ix = 0; ix < field.nx; ++ix) {
      size_t at = static_cast<size_t>(iy) * field.nx + ix;
      double level = field.mask[at] ? std::abs(field.values[at]) / peak : 0.0;
      out.put(static_cast<char>(std::lround(255.0 * std::clamp(level, 0.0, 1.0))));
    }
  write_text_file(path, out.str());
}

}  // namespace billiard
