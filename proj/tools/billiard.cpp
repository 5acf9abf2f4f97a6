// billiard: command-line driver for the polygon-billiard pipeline.
//
// Subcommands: epp, genus, periods, dirichlet, spectrum, field, verify,
// orbits, approximate. Inputs are JSON files or built-in family names.
// Primary results are printed to stdout as versioned JSON documents; --out
// writes the same bytes (or the derived file for field/approximate) to disk.
//
// Exit codes: 0 success, 1 invalid input, 2 usage error, 3 numerical failure.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "billiard/diophantine.hpp"
#include "billiard/dynamics.hpp"
#include "billiard/epp.hpp"
#include "billiard/errors.hpp"
#include "billiard/families.hpp"
#include "billiard/geometry.hpp"
#include "billiard/json_io.hpp"
#include "billiard/spectrum.hpp"
#include "billiard/wavefunction.hpp"

namespace {

using billiard::Errc;
using billiard::Error;
using ojson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// Everything one invocation needs, collected before any computation runs.
struct RunConfig {
  std::string command;
  std::string input;
  std::string out_path;
  std::string pgm_path;
  std::string vertex;
  std::vector<std::string> values;
  int64_t N = 1000;
  int64_t m = 1, n = 1;
  int64_t mn_range = 5;
  int grid = 256;
  int samples = 1024;
  int holes = 1;
  int max_bounces = 6;
  int budget = 21;
  double max_length = 0.0;  // 0 = choose from the domain size
  double eps = 0.1;
  std::string skeleton = "auto";
  uint64_t seed = 0;
};

// Numerical failures: the pipeline ran but could not produce a result.
int exit_code_for(Errc code) {
  switch (code) {
    case Errc::UnpairedSide:
    case Errc::NoCoprimeSolution:
    case Errc::NoGluingSide:
    case Errc::DegeneratePeriods:
    case Errc::PeriodsNotOrthogonal:
    case Errc::NoneFound:
    case Errc::SymmetryAbsent:
    case Errc::ConditionFViolated:
    case Errc::AdjacentGapTooWide:
    case Errc::Overflow:
      return kExitNumerical;
    default:
      return kExitInvalid;
  }
}

[[noreturn]] void usage_fail(const std::string& message) {
  throw CLI::ValidationError(message);
}

// ---------------------------------------------------------------------------
// Input loading
// ---------------------------------------------------------------------------

billiard::BilliardSpec load_spec_input(const RunConfig& cfg) {
  if (billiard::is_builtin_family(cfg.input))
    return billiard::builtin_family(cfg.input, cfg.holes);
  std::string text = billiard::read_text_file(cfg.input);
  if (billiard::json_is_curved(text))
    billiard::fail(Errc::BadParameters,
                   "'" + cfg.input + "' is a curved billiard; polygonize it with 'approximate'");
  return billiard::spec_from_json(text);
}

billiard::CurvedBilliard load_curved_input(const RunConfig& cfg) {
  if (cfg.input == "sinai") {
    billiard::SinaiParams p = billiard::sinai_defaults();
    return billiard::make_sinai(p.w, p.h, p.r);
  }
  if (billiard::is_builtin_family(cfg.input))
    billiard::fail(Errc::BadParameters,
                   "family '" + cfg.input + "' is polygonal; this command needs a curved billiard");
  std::string text = billiard::read_text_file(cfg.input);
  if (!billiard::json_is_curved(text))
    billiard::fail(Errc::BadParameters,
                   "'" + cfg.input + "' is a polygon spec; this command needs a curved billiard");
  return billiard::curved_from_json(text);
}

billiard::VertexId parse_vertex(const std::string& text) {
  // "P:V" selects vertex V of polygon P; a bare "V" means polygon 0.
  auto parse_int = [](const std::string& s, int& out) {
    if (s.empty()) return false;
    size_t pos = 0;
    try {
      out = std::stoi(s, &pos);
    } catch (const std::exception&) {
      return false;
    }
    return pos == s.size() && out >= 0;
  };
  billiard::VertexId v;
  auto colon = text.find(':');
  if (colon == std::string::npos) {
    if (!parse_int(text, v.vertex)) usage_fail("--vertex expects V or P:V, got '" + text + "'");
  } else {
    if (!parse_int(text.substr(0, colon), v.polygon) ||
        !parse_int(text.substr(colon + 1), v.vertex))
      usage_fail("--vertex expects V or P:V, got '" + text + "'");
  }
  return v;
}

double parse_value(const std::string& text) {
  // Accepts a decimal literal or an a/b fraction.
  auto parse_double = [](const std::string& s, double& out) {
    if (s.empty()) return false;
    size_t pos = 0;
    try {
      out = std::stod(s, &pos);
    } catch (const std::exception&) {
      return false;
    }
    return pos == s.size();
  };
  auto slash = text.find('/');
  double value = 0.0;
  if (slash == std::string::npos) {
    if (!parse_double(text, value)) usage_fail("cannot parse value '" + text + "'");
    return value;
  }
  double num = 0.0, den = 0.0;
  if (!parse_double(text.substr(0, slash), num) || !parse_double(text.substr(slash + 1), den) ||
      den == 0.0)
    usage_fail("cannot parse fraction '" + text + "'");
  return num / den;
}

// ---------------------------------------------------------------------------
// Shared JSON helpers
// ---------------------------------------------------------------------------

ojson json_header(const RunConfig& cfg) {
  ojson doc;
  doc["schema"] = "v1";
  doc["command"] = cfg.command;
  doc["seed"] = cfg.seed;
  return doc;
}

ojson json_vec(billiard::Vec2 v) { return ojson::array({v.x, v.y}); }

void emit(const RunConfig& cfg, const ojson& doc) {
  std::string text = doc.dump(2) + "\n";
  std::cout << text;
  if (!cfg.out_path.empty()) billiard::write_text_file(cfg.out_path, text);
}

// Builds the pattern and returns it with the chosen quantization pair and
// its rationalized coefficients; the shared front half of the quantum
// commands (spectrum, field, verify).
struct PreparedPattern {
  billiard::Epp epp;
  billiard::PureVec d1, d2;
  billiard::PeriodRationalization rat;
};

PreparedPattern prepare_pattern(const RunConfig& cfg) {
  PreparedPattern prep;
  billiard::BilliardSpec spec = load_spec_input(cfg);
  billiard::VertexId base =
      cfg.vertex.empty() ? billiard::choose_base_vertex(spec) : parse_vertex(cfg.vertex);
  prep.epp = billiard::build_full(spec, base);
  auto pair = billiard::suggest_pair(prep.epp);
  if (!pair)
    billiard::fail(Errc::NoneFound, "no independent exact period pair for quantization");
  prep.d1 = pair->first;
  prep.d2 = pair->second;
  billiard::decompose_periods(prep.epp, prep.d1, prep.d2);
  std::vector<std::pair<billiard::SymbolicCoord, billiard::SymbolicCoord>> coeffs;
  for (const auto& period : prep.epp.periods) {
    if (!period.coeffs)
      billiard::fail(Errc::DegeneratePeriods, "period decomposition left a gap");
    coeffs.push_back(*period.coeffs);
  }
  prep.rat = billiard::rationalize_period_coefficients(coeffs, prep.epp.spec.basis, cfg.N);
  return prep;
}

ojson json_state_row(const billiard::QuantumState& s, int64_t row_m, int64_t row_n, int64_t z1,
                     int64_t z2) {
  ojson row;
  row["m"] = row_m;
  row["n"] = row_n;
  row["Z1"] = z1;
  row["Z2"] = z2;
  row["px"] = s.p.x;
  row["py"] = s.p.y;
  row["E"] = s.energy;
  row["kind"] = (s.kind == billiard::SkeletonKind::periodic) ? "periodic" : "aperiodic";
  ojson flags = ojson::array();
  if (s.kind == billiard::SkeletonKind::periodic) {
    flags.push_back(s.sigma >= 0 ? "sigma+" : "sigma-");
    if (!s.condition_f_ok) flags.push_back("condition_f_violated");
  }
  row["flags"] = flags;
  return row;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_genus(const RunConfig& cfg) {
  billiard::BilliardSpec spec = load_spec_input(cfg);
  billiard::GenusReport report = billiard::compute_genus(spec);
  std::cout << "g=" << report.genus << "\n";
  if (!cfg.out_path.empty()) {
    ojson doc = json_header(cfg);
    doc["genus"] = report.genus;
    doc["E"] = ojson::array({report.E.num, report.E.den});
    doc["V"] = ojson::array({report.V.num, report.V.den});
    doc["S"] = ojson::array({report.S.num, report.S.den});
    billiard::write_text_file(cfg.out_path, doc.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_epp(const RunConfig& cfg) {
  billiard::BilliardSpec spec = load_spec_input(cfg);
  billiard::VertexId base =
      cfg.vertex.empty() ? billiard::choose_base_vertex(spec) : parse_vertex(cfg.vertex);
  billiard::Epp epp = billiard::build_full(spec, base);

  ojson doc = json_header(cfg);
  doc["base"] = ojson{{"polygon", base.polygon}, {"vertex", base.vertex}};
  doc["C"] = epp.C;
  doc["q"] = epp.q;
  doc["p"] = epp.p_prime;
  doc["sectors"] = epp.m;
  doc["cells"] = static_cast<int64_t>(epp.cells.size());
  int64_t zero_arcs = 0;
  for (const auto& pairing : epp.pairings)
    if (pairing.is_zero) ++zero_arcs;
  doc["pairings"] = static_cast<int64_t>(epp.pairings.size());
  doc["zero_arcs"] = zero_arcs;
  doc["period_count"] = static_cast<int64_t>(epp.periods.size());
  if (epp.m > 1)
    doc["gluing"] = ojson{{"polygon", epp.gluing_side.polygon},
                          {"side", epp.gluing_side.side},
                          {"delta", epp.gluing_delta}};
  ojson periods = ojson::array();
  for (const auto& period : epp.periods) {
    ojson row;
    row["v"] = json_vec(period.v);
    row["exact"] = period.exact;
    row["side"] = ojson{{"polygon", period.side.polygon}, {"side", period.side.side}};
    row["sectors"] = ojson::array({period.sector_from, period.sector_to});
    periods.push_back(std::move(row));
  }
  doc["periods"] = std::move(periods);
  emit(cfg, doc);
  return kExitOk;
}

int cmd_periods(const RunConfig& cfg) {
  billiard::BilliardSpec spec = load_spec_input(cfg);
  billiard::VertexId base =
      cfg.vertex.empty() ? billiard::choose_base_vertex(spec) : parse_vertex(cfg.vertex);
  billiard::Epp epp = billiard::build_full(spec, base);
  billiard::HomologyReport hom = billiard::homology_report(epp);

  ojson doc = json_header(cfg);
  doc["period_count"] = static_cast<int64_t>(epp.periods.size());
  doc["rank"] = hom.rank;
  doc["vertex_orbits"] = hom.vertex_orbits;
  doc["edges"] = hom.edges;
  doc["faces"] = hom.faces;
  auto pair = billiard::suggest_pair(epp);
  if (pair) {
    doc["pair"] = ojson{{"d1", json_vec(pair->first.value())}, {"d2", json_vec(pair->second.value())}};
  } else {
    doc["pair"] = nullptr;
  }
  ojson rows = ojson::array();
  for (const auto& period : epp.periods) {
    ojson row;
    row["v"] = json_vec(period.v);
    row["exact"] = period.exact;
    rows.push_back(std::move(row));
  }
  doc["periods"] = std::move(rows);
  emit(cfg, doc);
  return kExitOk;
}

int cmd_dirichlet(const RunConfig& cfg) {
  std::vector<double> alphas;
  for (const auto& text : cfg.values) alphas.push_back(parse_value(text));
  billiard::DirichletResult result = billiard::dirichlet_approx(alphas, cfg.N);

  ojson doc = json_header(cfg);
  doc["values"] = alphas;
  doc["N"] = result.N;
  doc["Z"] = result.Z;
  doc["numerators"] = result.numerators;
  doc["bound"] = result.bound;
  doc["errors"] = result.errors;
  emit(cfg, doc);
  return kExitOk;
}

int cmd_spectrum(const RunConfig& cfg) {
  PreparedPattern prep = prepare_pattern(cfg);
  int64_t z1 = prep.rat.x.quantizer();
  int64_t z2 = prep.rat.y.quantizer();
  billiard::Vec2 d1 = prep.d1.value();
  billiard::Vec2 d2 = prep.d2.value();

  ojson doc = json_header(cfg);
  doc["N"] = cfg.N;
  doc["skeleton"] = cfg.skeleton;
  doc["pair"] = ojson{{"d1", json_vec(d1)}, {"d2", json_vec(d2)}};
  ojson rows = ojson::array();

  if (cfg.skeleton == "auto") {
    auto states = billiard::generate_spectrum(d1, d2, z1, z2, cfg.mn_range);
    for (const auto& s : states) rows.push_back(json_state_row(s, s.m, s.n, z1, z2));
  } else {
    // Periodic skeleton along pair direction 1 (x) or 2 (y). The quantizer
    // call runs its skeleton along the second direction of the pair it is
    // given, so the x variant swaps the pair and the quantum-number roles.
    for (int64_t mm = -cfg.mn_range; mm <= cfg.mn_range; ++mm) {
      for (int64_t nn = -cfg.mn_range; nn <= cfg.mn_range; ++nn) {
        if (mm == 0 && nn == 0) continue;
        std::pair<billiard::QuantumState, billiard::QuantumState> branches =
            (cfg.skeleton == "y")
                ? billiard::quantize_periodic(prep.d1, prep.d2, z1, z2, mm, nn, cfg.eps)
                : billiard::quantize_periodic(prep.d2, prep.d1, z2, z1, nn, mm, cfg.eps);
        rows.push_back(json_state_row(branches.first, mm, nn, z1, z2));
        rows.push_back(json_state_row(branches.second, mm, nn, z1, z2));
      }
    }
    std::sort(rows.begin(), rows.end(), [](const ojson& a, const ojson& b) {
      double ea = a["E"].get<double>(), eb = b["E"].get<double>();
      if (ea != eb) return ea < eb;
      if (a["m"] != b["m"]) return a["m"].get<int64_t>() < b["m"].get<int64_t>();
      if (a["n"] != b["n"]) return a["n"].get<int64_t>() < b["n"].get<int64_t>();
      return a["flags"].dump() < b["flags"].dump();
    });
  }
  doc["states"] = std::move(rows);
  emit(cfg, doc);
  return kExitOk;
}

int cmd_field(const RunConfig& cfg) {
  if (cfg.out_path.empty()) usage_fail("field requires --out (CSV path)");
  PreparedPattern prep = prepare_pattern(cfg);
  int64_t z1 = prep.rat.x.quantizer();
  int64_t z2 = prep.rat.y.quantizer();
  billiard::QuantumState state =
      billiard::quantize_aperiodic(prep.d1.value(), prep.d2.value(), z1, z2, cfg.m, cfg.n);
  billiard::ScalarField field = billiard::grid_field(prep.epp, state, cfg.grid, cfg.grid);
  billiard::write_field_csv(cfg.out_path, field);
  if (!cfg.pgm_path.empty()) billiard::write_field_pgm(cfg.pgm_path, field);

  ojson doc = json_header(cfg);
  doc["m"] = cfg.m;
  doc["n"] = cfg.n;
  doc["Z1"] = z1;
  doc["Z2"] = z2;
  doc["energy"] = state.energy;
  doc["p"] = json_vec(state.p);
  doc["grid"] = ojson::array({field.nx, field.ny});
  doc["csv"] = cfg.out_path;
  if (cfg.pgm_path.empty())
    doc["pgm"] = nullptr;
  else
    doc["pgm"] = cfg.pgm_path;
  std::cout << doc.dump(2) + "\n";
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
  PreparedPattern prep = prepare_pattern(cfg);
  int64_t z1 = prep.rat.x.quantizer();
  int64_t z2 = prep.rat.y.quantizer();
  billiard::QuantumState state =
      billiard::quantize_aperiodic(prep.d1.value(), prep.d2.value(), z1, z2, cfg.m, cfg.n);

  ojson doc = json_header(cfg);
  doc["m"] = cfg.m;
  doc["n"] = cfg.n;
  doc["N"] = cfg.N;
  doc["Z1"] = z1;
  doc["Z2"] = z2;
  doc["energy"] = state.energy;
  bool all_ok = true;
  ojson rows = ojson::array();
  const auto& spec = prep.epp.spec;
  for (int poly = 0; poly < static_cast<int>(spec.polygons.size()); ++poly) {
    for (int side = 0; side < spec.polygons[poly].size(); ++side) {
      billiard::ResidualReport report = billiard::boundary_residual(
          prep.epp, state, prep.rat, billiard::SideId{poly, side}, cfg.samples);
      bool ok = report.measured <= report.bound + 1e-12;
      all_ok = all_ok && ok;
      ojson row;
      row["side"] = report.label;
      row["samples"] = report.samples;
      row["measured"] = report.measured;
      row["bound"] = report.bound;
      row["weak_pairs"] = report.weak_pairs;
      row["ok"] = ok;
      rows.push_back(std::move(row));
    }
  }
  doc["sides"] = std::move(rows);
  doc["all_ok"] = all_ok;
  emit(cfg, doc);
  if (!all_ok) {
    std::cerr << "verify: a measured residual exceeds its certified bound\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_orbits(const RunConfig& cfg) {
  billiard::CurvedBilliard cb = load_curved_input(cfg);
  double max_length = cfg.max_length;
  if (max_length <= 0.0) {
    // Default budget: four domain diameters.
    double lo_x = cb.outer[0].x, hi_x = lo_x, lo_y = cb.outer[0].y, hi_y = lo_y;
    for (const auto& p : cb.outer) {
      lo_x = std::min(lo_x, p.x);
      hi_x = std::max(hi_x, p.x);
      lo_y = std::min(lo_y, p.y);
      hi_y = std::max(hi_y, p.y);
    }
    max_length = 4.0 * std::hypot(hi_x - lo_x, hi_y - lo_y);
  }
  std::vector<billiard::Orbit> orbits =
      billiard::find_periodic_orbits(cb, cfg.max_bounces, max_length);

  ojson doc = json_header(cfg);
  doc["max_bounces"] = cfg.max_bounces;
  doc["max_length"] = max_length;
  doc["count"] = static_cast<int64_t>(orbits.size());
  ojson rows = ojson::array();
  for (const auto& orbit : orbits) {
    ojson row;
    row["length"] = orbit.length;
    row["surfaces"] = orbit.surfaces;
    row["stability"] = (orbit.tag == billiard::StabilityTag::family) ? "family" : "isolated";
    row["hits_circle"] = orbit.hits_circle;
    ojson pts = ojson::array();
    for (const auto& p : orbit.points) pts.push_back(json_vec(p));
    row["points"] = std::move(pts);
    rows.push_back(std::move(row));
  }
  doc["orbits"] = std::move(rows);
  emit(cfg, doc);
  return kExitOk;
}

int cmd_approximate(const RunConfig& cfg) {
  billiard::CurvedBilliard cb = load_curved_input(cfg);
  billiard::ApproximationResult result =
      billiard::approximate_billiard(cb, cfg.budget, cfg.max_bounces);
  std::string spec_text = billiard::spec_to_json(result.spec);
  if (!cfg.out_path.empty()) billiard::write_text_file(cfg.out_path, spec_text);

  ojson doc = json_header(cfg);
  doc["orbit_budget"] = cfg.budget;
  doc["tangent_angles"] = result.tangent_angles;
  ojson sides = ojson::array();
  for (const auto& per_circle : result.tangent_angles)
    sides.push_back(static_cast<int64_t>(per_circle.size()));
  doc["hole_sides"] = std::move(sides);
  doc["beta_arc"] = ojson::array({result.beta_arc.first, result.beta_arc.second});
  doc["beta_gap"] = result.beta_gap;
  doc["snapped_exact"] = result.snapped_exact;
  doc["angle_Z"] = result.angle_Z;
  doc["angle_bound"] = result.angle_bound;
  if (cfg.out_path.empty())
    doc["spec"] = ojson::parse(spec_text);
  else
    doc["out"] = cfg.out_path;
  std::cout << doc.dump(2) + "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Argument grammar
// ---------------------------------------------------------------------------

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "Run seed, recorded in every output document");
}

void add_spec_input(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("input", cfg.input, "Spec JSON path or built-in family name")->required();
  cmd->add_option("--holes", cfg.holes, "Hole count for the built-in rectangle families")
      ->check(CLI::Range(0, 8));
}

int run(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Semiclassical quantization of rational polygon billiards"};
  app.require_subcommand(1);

  CLI::App* genus = app.add_subcommand("genus", "Genus of the unfolding surface");
  add_spec_input(genus, cfg);
  add_common(genus, cfg);
  genus->add_option("--out", cfg.out_path, "Write the Euler counts as JSON");

  CLI::App* epp = app.add_subcommand("epp", "Build the elementary polygon pattern");
  add_spec_input(epp, cfg);
  add_common(epp, cfg);
  epp->add_option("--vertex", cfg.vertex, "Base vertex V or P:V (default: best)");
  epp->add_option("--out", cfg.out_path, "Write the pattern summary JSON");

  CLI::App* periods = app.add_subcommand("periods", "Periods and homology rank");
  add_spec_input(periods, cfg);
  add_common(periods, cfg);
  periods->add_option("--vertex", cfg.vertex, "Base vertex V or P:V (default: best)");
  periods->add_option("--out", cfg.out_path, "Write the period list JSON");

  CLI::App* dirichlet = app.add_subcommand("dirichlet", "Simultaneous rational approximation");
  dirichlet->add_option("values", cfg.values, "Real numbers (decimals or a/b fractions)")
      ->required()
      ->expected(-1);
  dirichlet->add_option("--N", cfg.N, "Quality parameter (Z <= N)")->check(CLI::PositiveNumber);
  add_common(dirichlet, cfg);
  dirichlet->add_option("--out", cfg.out_path, "Write the result JSON");

  CLI::App* spectrum = app.add_subcommand("spectrum", "Semiclassical energy spectrum");
  add_spec_input(spectrum, cfg);
  add_common(spectrum, cfg);
  spectrum->add_option("--mn-range", cfg.mn_range, "Quantum numbers range 1..R")
      ->check(CLI::PositiveNumber);
  spectrum->add_option("--N", cfg.N, "Approximation quality")->check(CLI::PositiveNumber);
  spectrum->add_option("--skeleton", cfg.skeleton, "Skeleton: auto (aperiodic), x, or y")
      ->check(CLI::IsMember({"auto", "x", "y"}));
  spectrum->add_option("--eps", cfg.eps, "Bound-correction budget for periodic states");
  spectrum->add_option("--vertex", cfg.vertex, "Base vertex V or P:V (default: best)");
  spectrum->add_option("--out", cfg.out_path, "Write the spectrum JSON");

  CLI::App* field = app.add_subcommand("field", "Sample a wavefunction on a grid");
  add_spec_input(field, cfg);
  add_common(field, cfg);
  field->add_option("--m", cfg.m, "First quantum number")->required();
  field->add_option("--n", cfg.n, "Second quantum number")->required();
  field->add_option("--N", cfg.N, "Approximation quality")->check(CLI::PositiveNumber);
  field->add_option("--grid", cfg.grid, "Grid resolution per axis")->check(CLI::Range(2, 8192));
  field->add_option("--vertex", cfg.vertex, "Base vertex V or P:V (default: best)");
  field->add_option("--out", cfg.out_path, "CSV output path");
  field->add_option("--pgm", cfg.pgm_path, "Optional PGM image path");

  CLI::App* verify = app.add_subcommand("verify", "Boundary residuals against certified bounds");
  add_spec_input(verify, cfg);
  add_common(verify, cfg);
  verify->add_option("--m", cfg.m, "First quantum number")->required();
  verify->add_option("--n", cfg.n, "Second quantum number")->required();
  verify->add_option("--N", cfg.N, "Approximation quality")->check(CLI::PositiveNumber);
  verify->add_option("--samples", cfg.samples, "Samples per side")->check(CLI::Range(2, 65536));
  verify->add_option("--vertex", cfg.vertex, "Base vertex V or P:V (default: best)");
  verify->add_option("--out", cfg.out_path, "Write the residual table JSON");

  CLI::App* orbits = app.add_subcommand("orbits", "Periodic orbits of a curved billiard");
  orbits->add_option("input", cfg.input, "Curved-billiard JSON path or 'sinai'")->required();
  add_common(orbits, cfg);
  orbits->add_option("--max-bounces", cfg.max_bounces, "Bounce budget")->check(CLI::Range(2, 8));
  orbits->add_option("--max-length", cfg.max_length, "Length budget (default: 4 diameters)");
  orbits->add_option("--out", cfg.out_path, "Write the orbit list JSON");

  CLI::App* approx = app.add_subcommand("approximate", "Polygonize circular scatterers");
  approx->add_option("input", cfg.input, "Curved-billiard JSON path or 'sinai'")->required();
  add_common(approx, cfg);
  approx->add_option("--k", cfg.budget, "Shortest circle-hitting orbits to use")
      ->check(CLI::Range(3, 10000));
  approx->add_option("--max-bounces", cfg.max_bounces, "Bounce budget")->check(CLI::Range(2, 8));
  approx->add_option("--out", cfg.out_path, "Write the polygonized spec JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints help or the error message
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  try {
    if (cfg.command == "genus") return cmd_genus(cfg);
    if (cfg.command == "epp") return cmd_epp(cfg);
    if (cfg.command == "periods") return cmd_periods(cfg);
    if (cfg.command == "dirichlet") return cmd_dirichlet(cfg);
    if (cfg.command == "spectrum") return cmd_spectrum(cfg);
    if (cfg.command == "field") return cmd_field(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    if (cfg.command == "orbits") return cmd_orbits(cfg);
    if (cfg.command == "approximate") return cmd_approximate(cfg);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "billiard " << cfg.command << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "billiard " << cfg.command << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "billiard " << cfg.command << ": " << e.what() << "\n";
    return kExitInvalid;
  }
  std::cerr << "billiard: unknown command\n";
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
