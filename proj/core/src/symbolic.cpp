#include "billiard/symbolic.hpp"

#include <algorithm>
#include <cmath>

namespace billiard {

namespace {
constexpr double kSqrt3 = 1.7320508075688772935;
}

// ---------------------------------------------------------------------------
// Basis
// ---------------------------------------------------------------------------

int Basis::find(const std::string& name) const {
  for (size_t i = 0; i < atoms.size(); ++i)
    if (atoms[i].name == name) return static_cast<int>(i);
  return kNoPartner;
}

int Basis::find_or_add(const std::string& name, double value) {
  int idx = find(name);
  if (idx >= 0) return idx;
  atoms.push_back(BasisAtom{name, value, kNoPartner, Rat(0)});
  return static_cast<int>(atoms.size()) - 1;
}

void Basis::auto_link(double rel_tol) {
  auto close = [rel_tol](double a, double b) {
    return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
  };
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (close(atoms[i].value, kSqrt3)) {
      sqrt3_index = static_cast<int>(i);
      // sqrt(3) * sqrt(3) = 3 lands back in the rational part.
      atoms[i].sqrt3_partner = kRationalUnit;
      atoms[i].sqrt3_factor = Rat(3);
    }
  }
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].sqrt3_partner != kNoPartner) continue;
    for (size_t j = 0; j < atoms.size(); ++j) {
      if (i == j) continue;
      if (close(kSqrt3 * atoms[i].value, atoms[j].value)) {
        // sqrt(3)*atom_i = atom_j  and  sqrt(3)*atom_j = 3*atom_i.
        atoms[i].sqrt3_partner = static_cast<int>(j);
        atoms[i].sqrt3_factor = Rat(1);
        atoms[j].sqrt3_partner = static_cast<int>(i);
        atoms[j].sqrt3_factor = Rat(3);
        break;
      }
    }
  }
}

void ensure_sqrt3_closure(Basis& basis) {
  basis.find_or_add("sqrt3", kSqrt3);
  size_t n = basis.size();
  for (size_t i = 0; i < n; ++i) {
    BasisAtom& at = basis.atoms[i];
    if (at.sqrt3_partner != kNoPartner) continue;
    double target = kSqrt3 * at.value;
    if (auto r = rat_from_double(target, 10000, 1e-12)) {
      at.sqrt3_partner = kRationalUnit;
      at.sqrt3_factor = *r;
      continue;
    }
    bool found = false;
    for (size_t j = 0; j < basis.size() && !found; ++j)
      found = (j != i) &&
              std::abs(basis.atoms[j].value - target) <=
                  1e-12 * std::max({1.0, std::abs(target), std::abs(basis.atoms[j].value)});
    if (!found) basis.find_or_add(at.name + "_sqrt3", target);
  }
  basis.auto_link();
}

// ---------------------------------------------------------------------------
// SymbolicCoord
// ---------------------------------------------------------------------------

SymbolicCoord SymbolicCoord::atom(int index, double atom_value, Rat coeff) {
  SymbolicCoord c;
  c.terms.emplace_back(index, coeff);
  c.value = coeff.value() * atom_value;
  return c;
}

SymbolicCoord SymbolicCoord::inexact(double v) {
  SymbolicCoord c;
  c.value = v;
  c.exact = false;
  return c;
}

void SymbolicCoord::normalize() {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, Rat>> merged;
  for (const auto& [idx, coeff] : terms) {
    if (!merged.empty() && merged.back().first == idx) {
      merged.back().second += coeff;
    } else {
      merged.emplace_back(idx, coeff);
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const auto& t) { return t.second.is_zero(); }),
               merged.end());
  terms = std::move(merged);
}

double evaluate_symbolic(const SymbolicCoord& c, const Basis& basis) {
  if (!c.exact) return c.value;
  double v = c.rat.value();
  for (const auto& [idx, coeff] : c.terms) {
    if (idx < 0 || idx >= static_cast<int>(basis.size()))
      fail(Errc::UnknownBasisIndex, "term references basis atom " + std::to_string(idx));
    v += coeff.value() * basis.atoms[static_cast<size_t>(idx)].value;
  }
  return v;
}

SymbolicCoord sym_add(const SymbolicCoord& a, const SymbolicCoord& b) {
  SymbolicCoord r;
  r.value = a.value + b.value;
  r.exact = a.exact && b.exact;
  if (r.exact) {
    r.rat = a.rat + b.rat;
    r.terms = a.terms;
    r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
    r.normalize();
  }
  return r;
}

SymbolicCoord sym_sub(const SymbolicCoord& a, const SymbolicCoord& b) {
  return sym_add(a, sym_neg(b));
}

SymbolicCoord sym_neg(const SymbolicCoord& a) {
  SymbolicCoord r = a;
  r.value = -r.value;
  if (r.exact) {
    r.rat = -r.rat;
    for (auto& t : r.terms) t.second = -t.second;
  }
  return r;
}

SymbolicCoord sym_scale(const SymbolicCoord& a, const Rat& s) {
  SymbolicCoord r = a;
  r.value = a.value * s.value();
  if (r.exact) {
    r.rat = a.rat * s;
    for (auto& t : r.terms) t.second = t.second * s;
    r.normalize();
  }
  return r;
}

SymbolicCoord sym_mul_sqrt3(const SymbolicCoord& a, const Basis& basis) {
  SymbolicCoord r;
  r.value = a.value * kSqrt3;
  r.exact = a.exact;
  if (!r.exact) return r;
  // sqrt(3) * rational part needs a dedicated sqrt(3) atom.
  if (!a.rat.is_zero()) {
    if (basis.sqrt3_index < 0) return SymbolicCoord::inexact(r.value);
    r.terms.emplace_back(basis.sqrt3_index, a.rat);
  }
  for (const auto& [idx, coeff] : a.terms) {
    if (idx < 0 || idx >= static_cast<int>(basis.size()))
      fail(Errc::UnknownBasisIndex, "term references basis atom " + std::to_string(idx));
    const BasisAtom& atom = basis.atoms[static_cast<size_t>(idx)];
    if (atom.sqrt3_partner == kRationalUnit) {
      r.rat += coeff * atom.sqrt3_factor;
    } else if (atom.sqrt3_partner >= 0) {
      r.terms.emplace_back(atom.sqrt3_partner, coeff * atom.sqrt3_factor);
    } else {
      return SymbolicCoord::inexact(r.value);
    }
  }
  r.normalize();
  return r;
}

SymbolicCoord sym_scale_q3(const SymbolicCoord& a, const Q3& s, const Basis& basis) {
  if (s.is_rational()) return sym_scale(a, s.a);
  SymbolicCoord lin = sym_scale(a, s.a);
  SymbolicCoord root = sym_scale(sym_mul_sqrt3(a, basis), s.b);
  return sym_add(lin, root);
}

bool sym_equal(const SymbolicCoord& a, const SymbolicCoord& b) {
  if (!a.exact || !b.exact) return false;
  if (!(a.rat == b.rat)) return false;
  if (a.terms.size() != b.terms.size()) return false;
  for (size_t i = 0; i < a.terms.size(); ++i)
    if (a.terms[i].first != b.terms[i].first || !(a.terms[i].second == b.terms[i].second))
      return false;
  return true;
}

}  // namespace billiard
