#include "billiard/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "billiard/parallel.hpp"

namespace billiard {

namespace {

constexpr double kSlack = 1e-14;

double max_rounding_error(const std::vector<double>& alphas, int64_t Z) {
  double worst = 0.0;
  for (double a : alphas) {
    double za = static_cast<double>(Z) * a;
    worst = std::max(worst, std::abs(za - static_cast<double>(nearest_int(za))));
  }
  return worst;
}

}  // namespace

DirichletResult dirichlet_approx(const std::vector<double>& alphas, int64_t N) {
  if (alphas.empty()) fail(Errc::EmptyInput, "no values to approximate");
  if (N < 1) fail(Errc::BadParameters, "N must be >= 1");
  double p = static_cast<double>(alphas.size());
  double bound = std::pow(static_cast<double>(N), -1.0 / p);

  // Two tiers: when some denominator represents every value exactly (up to a
  // uniform 1e-14 on the value itself), the smallest such Z wins even if a
  // smaller Z already clears the pigeonhole bound; otherwise the smallest
  // Z clearing the bound wins. Parallel scan over Z with a chunk-ordered
  // merge, so the result is independent of scheduling.
  std::vector<int64_t> found_exact(static_cast<size_t>(thread_count()) + 1, 0);
  std::vector<int64_t> found(static_cast<size_t>(thread_count()) + 1, 0);
  parallel_chunks(static_cast<size_t>(N), [&](size_t chunk, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      int64_t Z = static_cast<int64_t>(i) + 1;
      double err = max_rounding_error(alphas, Z);
      if (err > bound + kSlack) continue;
      if (found[chunk] == 0) found[chunk] = Z;
      if (err <= static_cast<double>(Z) * kSlack) {
        found_exact[chunk] = Z;
        return;
      }
    }
  });
  int64_t Z = 0;
  for (int64_t z : found_exact)
    if (z > 0) {
      Z = z;
      break;
    }
  if (Z == 0) {
    for (int64_t z : found)
      if (z > 0) {
        Z = (Z == 0) ? z : std::min(Z, z);
      }
  }
  if (Z == 0)
    fail(Errc::NoneFound, "no admissible denominator up to N (numeric overflow in Z*alpha?)");

  DirichletResult res;
  res.Z = Z;
  res.N = N;
  res.bound = bound / static_cast<double>(Z);
  for (double a : alphas) {
    int64_t zk = nearest_int(static_cast<double>(Z) * a);
    res.numerators.push_back(zk);
    res.errors.push_back(std::abs(a - static_cast<double>(zk) / static_cast<double>(Z)));
  }
  return res;
}

std::vector<int64_t> all_admissible_Z(const std::vector<double>& alphas, int64_t N) {
  if (alphas.empty()) fail(Errc::EmptyInput, "no values to approximate");
  if (N < 1) fail(Errc::BadParameters, "N must be >= 1");
  double bound = std::pow(static_cast<double>(N), -1.0 / static_cast<double>(alphas.size()));
  std::vector<int64_t> out;
  for (int64_t Z = 1; Z <= N; ++Z)
    if (max_rounding_error(alphas, Z) <= bound + kSlack) out.push_back(Z);
  return out;
}

RationalizedAngles rationalize_angles(const std::vector<double>& angles_pi,
                                      const std::vector<int>& polygon_sizes, int64_t N) {
  if (angles_pi.empty() || polygon_sizes.empty()) fail(Errc::EmptyInput, "no angles given");
  int64_t total_sides = std::accumulate(polygon_sizes.begin(), polygon_sizes.end(), int64_t{0});
  if (total_sides != static_cast<int64_t>(angles_pi.size()))
    fail(Errc::BadParameters, "polygon sizes do not match the angle count");
  int64_t k = static_cast<int64_t>(polygon_sizes.size());
  double closure = static_cast<double>(total_sides + 2 * k - 4);
  double sum = std::accumulate(angles_pi.begin(), angles_pi.end(), 0.0);
  if (std::abs(sum - closure) > 1e-9)
    fail(Errc::ClosureViolation, "interior angles sum to " + std::to_string(sum) +
                                     " pi, expected " + std::to_string(closure));
  if (angles_pi.size() < 2) fail(Errc::BadParameters, "need at least two angles");

  std::vector<double> head(angles_pi.begin(), angles_pi.end() - 1);
  DirichletResult dr = dirichlet_approx(head, N);

  RationalizedAngles out;
  out.Z = dr.Z;
  out.distinguished_index = static_cast<int>(angles_pi.size()) - 1;
  Rat sum_head(0);
  for (size_t i = 0; i < head.size(); ++i) {
    Rat r = Rat::make(dr.numerators[i], dr.Z);
    out.angles.push_back(r);
    sum_head += r;
  }
  Rat last = Rat(total_sides + 2 * k - 4) - sum_head;
  if (!(last > Rat(0)) || !(last < Rat(2)))
    fail(Errc::ClosureViolation,
         "distinguished angle " + to_string(last) + " pi falls outside (0, 2)");
  out.angles.push_back(last);

  double S = static_cast<double>(angles_pi.size());
  out.per_angle_bound = std::pow(static_cast<double>(N), -1.0 / (S - 1.0)) / static_cast<double>(dr.Z);
  out.distinguished_bound_strict = (S - 1.0) * out.per_angle_bound;
  out.distinguished_bound = (S - 1.0) /
                            (static_cast<double>(dr.Z) *
                             std::pow(static_cast<double>(N), 1.0 / (S + static_cast<double>(k) - 2.0)));
  return out;
}

DirectionRationalization rationalize_coordinates(const std::vector<SymbolicCoord>& coords,
                                                 const Basis& basis, int64_t N) {
  DirectionRationalization dir;
  std::vector<int> atoms;
  int64_t lcm = 1;
  for (const SymbolicCoord& c : coords) {
    if (!c.exact) fail(Errc::MixedBasis, "coordinate is not expressed over the shared basis");
    lcm = lcm64(lcm, c.rat.den);
    for (const auto& [idx, coeff] : c.terms) {
      if (idx < 0 || idx >= static_cast<int>(basis.size()))
        fail(Errc::UnknownBasisIndex, "coefficient references atom " + std::to_string(idx));
      lcm = lcm64(lcm, coeff.den);
      if (std::find(atoms.begin(), atoms.end(), idx) == atoms.end()) atoms.push_back(idx);
    }
  }
  std::sort(atoms.begin(), atoms.end());
  dir.atom_indices = atoms;
  dir.C = lcm;
  if (atoms.empty()) {
    dir.Z = 1;
    dir.bound = 0.0;  // all coefficients rational: the approximation is exact
    return dir;
  }
  std::vector<double> values;
  for (int idx : atoms) values.push_back(basis.atoms[static_cast<size_t>(idx)].value);
  DirichletResult dr = dirichlet_approx(values, N);
  dir.Z = dr.Z;
  dir.numerators = dr.numerators;
  dir.bound = std::pow(static_cast<double>(N), -1.0 / static_cast<double>(values.size()));
  return dir;
}

PeriodRationalization rationalize_period_coefficients(
    const std::vector<std::pair<SymbolicCoord, SymbolicCoord>>& xi_eta, const Basis& basis,
    int64_t N) {
  if (xi_eta.empty()) fail(Errc::EmptyInput, "no period coefficients given");

  std::vector<SymbolicCoord> xs, ys;
  xs.reserve(xi_eta.size());
  ys.reserve(xi_eta.size());
  for (const auto& [xi, eta] : xi_eta) {
    xs.push_back(xi);
    ys.push_back(eta);
  }
  PeriodRationalization out;
  out.N = N;
  out.x = rationalize_coordinates(xs, basis, N);
  out.y = rationalize_coordinates(ys, basis, N);
  return out;
}

double coefficient_certificate(const SymbolicCoord& coord, const DirectionRationalization& dir) {
  double total = 0.0;
  for (const auto& [idx, coeff] : coord.terms) {
    (void)idx;
    total += static_cast<double>(dir.C) * std::abs(coeff.value());
  }
  return total;
}

}  // namespace billiard
