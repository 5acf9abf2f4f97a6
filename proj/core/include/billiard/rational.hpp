#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>

#include "billiard/errors.hpp"

namespace billiard {

// ---------------------------------------------------------------------------
// Exact rational arithmetic on int64 numerator/denominator.
//
// All intermediates go through __int128; anything that would not normalize
// back into int64 raises Errc::Overflow instead of wrapping silently.
// ---------------------------------------------------------------------------

namespace detail {

using I128 = __int128;

inline int64_t narrow(I128 v) {
  if (v > INT64_MAX || v < INT64_MIN) fail(Errc::Overflow, "rational arithmetic exceeds 64 bits");
  return static_cast<int64_t>(v);
}

inline I128 iabs(I128 v) { return v < 0 ? -v : v; }

inline I128 gcd128(I128 a, I128 b) {
  a = iabs(a);
  b = iabs(b);
  while (b != 0) {
    I128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace detail

// Exact rational number, always stored normalized (den > 0, gcd(num, den) = 1).
struct Rat {
  int64_t num = 0;
  int64_t den = 1;

  Rat() = default;
  Rat(int64_t n) : num(n), den(1) {}  // NOLINT: implicit by design
  Rat(int64_t n, int64_t d) { *this = make(n, d); }

  static Rat make(detail::I128 n, detail::I128 d) {
    if (d == 0) fail(Errc::DegenerateLine, "rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    detail::I128 g = detail::gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    Rat r;
    r.num = detail::narrow(n);
    r.den = detail::narrow(d);
    return r;
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_zero() const { return num == 0; }
  bool is_integer() const { return den == 1; }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return make(detail::I128(a.num) * b.den + detail::I128(b.num) * a.den,
                detail::I128(a.den) * b.den);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return make(detail::I128(a.num) * b.den - detail::I128(b.num) * a.den,
                detail::I128(a.den) * b.den);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return make(detail::I128(a.num) * b.num, detail::I128(a.den) * b.den);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num == 0) fail(Errc::DegenerateLine, "rational division by zero");
    return make(detail::I128(a.num) * b.den, detail::I128(a.den) * b.num);
  }
  Rat operator-() const {
    Rat r;
    r.num = -num;
    r.den = den;
    return r;
  }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    detail::I128 lhs = detail::I128(a.num) * b.den;
    detail::I128 rhs = detail::I128(b.num) * a.den;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
};

inline Rat abs(const Rat& r) { return r.num < 0 ? -r : r; }

// Floor of a rational as an integer.
inline int64_t floor_div(const Rat& r) {
  int64_t q = r.num / r.den;
  if (r.num % r.den != 0 && r.num < 0) --q;
  return q;
}

// r reduced modulo m (result in [0, m) for m > 0).
inline Rat rat_mod(const Rat& r, const Rat& m) {
  Rat q = r / m;
  return r - Rat(floor_div(q)) * m;
}

inline int64_t lcm64(int64_t a, int64_t b) {
  if (a == 0 || b == 0) return 0;
  int64_t g = std::gcd(a, b);
  return detail::narrow(detail::I128(a) / g * b);
}

// Nearest integer, ties rounded away from zero.
inline int64_t nearest_int(double x) {
  return static_cast<int64_t>(std::llround(x));
}

// Best rational approximation of x with denominator <= max_den (continued
// fractions); returns nothing if the best candidate misses x by more than tol.
inline std::optional<Rat> rat_from_double(double x, int64_t max_den = 10000, double tol = 1e-9) {
  if (!std::isfinite(x)) return std::nullopt;
  // Convergents p/q of the continued-fraction expansion.
  int64_t p0 = 1, q0 = 0;  // p(-1)/q(-1)
  int64_t p1 = 0, q1 = 1;  // p(0)/q(0) seeds reversed below on first step
  double v = x;
  p1 = static_cast<int64_t>(std::floor(v));
  q1 = 1;
  double frac = v - std::floor(v);
  for (int iter = 0; iter < 64; ++iter) {
    if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= tol) break;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
    int64_t a = static_cast<int64_t>(std::floor(v));
    frac = v - std::floor(v);
    detail::I128 p2 = detail::I128(a) * p1 + p0;
    detail::I128 q2 = detail::I128(a) * q1 + q0;
    if (q2 > max_den || p2 > INT64_MAX || p2 < INT64_MIN) break;
    p0 = p1;
    q0 = q1;
    p1 = static_cast<int64_t>(p2);
    q1 = static_cast<int64_t>(q2);
  }
  Rat r = Rat::make(p1, q1);
  if (std::abs(r.value() - x) > tol) return std::nullopt;
  return r;
}

inline std::string to_string(const Rat& r) {
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

// ---------------------------------------------------------------------------
// Exact numbers of the form a + b*sqrt(3) with rational a, b.
//
// Closed under +, -, *, and / (rationalizing by the conjugate); this is the
// scalar field in which every rotation/reflection by a multiple of 30 degrees
// has exact matrix entries.
// ---------------------------------------------------------------------------

struct Q3 {
  Rat a;  // rational part
  Rat b;  // coefficient of sqrt(3)

  Q3() = default;
  Q3(Rat ra) : a(ra) {}  // NOLINT: implicit by design
  Q3(Rat ra, Rat rb) : a(ra), b(rb) {}

  double value() const { return a.value() + b.value() * 1.7320508075688772935; }
  bool is_zero() const { return a.is_zero() && b.is_zero(); }
  bool is_rational() const { return b.is_zero(); }

  friend Q3 operator+(const Q3& x, const Q3& y) { return {x.a + y.a, x.b + y.b}; }
  friend Q3 operator-(const Q3& x, const Q3& y) { return {x.a - y.a, x.b - y.b}; }
  Q3 operator-() const { return {-a, -b}; }
  friend Q3 operator*(const Q3& x, const Q3& y) {
    return {x.a * y.a + Rat(3) * x.b * y.b, x.a * y.b + x.b * y.a};
  }
  friend Q3 operator/(const Q3& x, const Q3& y) {
    // 1/(a+b sqrt3) = (a-b sqrt3)/(a^2-3 b^2); the norm vanishes only at 0.
    Rat norm = y.a * y.a - Rat(3) * y.b * y.b;
    if (norm.is_zero()) fail(Errc::DegenerateLine, "division by zero in sqrt(3) field");
    Q3 conj{y.a, -y.b};
    Q3 prod = x * conj;
    return {prod.a / norm, prod.b / norm};
  }
  friend bool operator==(const Q3& x, const Q3& y) { return x.a == y.a && x.b == y.b; }
};

// Exact cos/sin of pi*t for rational t whose reduced denominator divides 6
// (all multiples of 30 degrees). Returns nothing otherwise.
inline std::optional<std::pair<Q3, Q3>> exact_cos_sin_pi(const Rat& t) {
  if (6 % t.den != 0) return std::nullopt;
  int64_t k = ((t.num * (6 / t.den)) % 12 + 12) % 12;  // angle = pi*k/6
  static const auto table = [] {
    // cos(pi*k/6), sin(pi*k/6) for k = 0..11 as (a, b) pairs of a + b*sqrt3.
    std::pair<Q3, Q3> tb[12];
    auto q = [](Rat a, Rat b) { return Q3{a, b}; };
    Rat z(0), one(1), half(1, 2);
    tb[0] = {q(one, z), q(z, z)};
    tb[1] = {q(z, half), q(half, z)};
    tb[2] = {q(half, z), q(z, half)};
    tb[3] = {q(z, z), q(one, z)};
    tb[4] = {q(-half, z), q(z, half)};
    tb[5] = {q(z, -half), q(half, z)};
    tb[6] = {q(-one, z), q(z, z)};
    tb[7] = {q(z, -half), q(-half, z)};
    tb[8] = {q(-half, z), q(z, -half)};
    tb[9] = {q(z, z), q(-one, z)};
    tb[10] = {q(half, z), q(z, -half)};
    tb[11] = {q(z, half), q(-half, z)};
    return std::array<std::pair<Q3, Q3>, 12>{tb[0], tb[1], tb[2],  tb[3], tb[4], tb[5],
                                             tb[6], tb[7], tb[8],  tb[9], tb[10], tb[11]};
  }();
  return table[static_cast<size_t>(k)];
}

}  // namespace billiard
