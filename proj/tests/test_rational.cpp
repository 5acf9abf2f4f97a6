#include <doctest.h>

#include <cstdint>
#include <limits>

#include "billiard/rational.hpp"
#include "test_util.hpp"

using namespace billiard;

// ---------------------------------------------------------------------------
// Exact rationals
// ---------------------------------------------------------------------------

TEST_CASE("rationals normalize to positive denominator and lowest terms") {
  Rat r(6, -4);
  CHECK(r.num == -3);
  CHECK(r.den == 2);
  CHECK(Rat(0, 7) == Rat(0));
  CHECK(Rat(10, 5).is_integer());
  CHECK(to_string(Rat(-3, 2)) == "-3/2");
  CHECK(to_string(Rat(4)) == "4");
}

TEST_CASE("rational arithmetic is exact") {
  Rat a(1, 3), b(1, 6);
  CHECK(a + b == Rat(1, 2));
  CHECK(a - b == Rat(1, 6));
  CHECK(a * b == Rat(1, 18));
  CHECK(a / b == Rat(2));
  CHECK(-a == Rat(-1, 3));
  CHECK(abs(Rat(-5, 7)) == Rat(5, 7));
  CHECK(a < Rat(1, 2));
  CHECK(Rat(-1, 2) < Rat(-1, 3));
  // Accumulating thirds never drifts.
  Rat sum(0);
  for (int i = 0; i < 3000; ++i) sum += Rat(1, 3);
  CHECK(sum == Rat(1000));
}

TEST_CASE("rational edge cases raise typed errors") {
  expect_errc(Errc::DegenerateLine, [] { Rat(1, 0); });
  expect_errc(Errc::DegenerateLine, [] { Rat(1, 2) / Rat(0); });
  const int64_t big = std::numeric_limits<int64_t>::max();
  expect_errc(Errc::Overflow, [&] { Rat(big) * Rat(big); });
  expect_errc(Errc::Overflow, [&] { Rat(big) + Rat(1); });
}

TEST_CASE("floor_div and rat_mod reduce into the expected window") {
  CHECK(floor_div(Rat(7, 2)) == 3);
  CHECK(floor_div(Rat(-7, 2)) == -4);
  CHECK(floor_div(Rat(-6, 2)) == -3);
  CHECK(rat_mod(Rat(7, 2), Rat(2)) == Rat(3, 2));
  CHECK(rat_mod(Rat(-1, 4), Rat(2)) == Rat(7, 4));
  CHECK(rat_mod(Rat(4), Rat(2)) == Rat(0));
  // Results always land in [0, m).
  for (int num = -9; num <= 9; ++num) {
    Rat m = rat_mod(Rat(num, 4), Rat(1));
    CHECK(Rat(0) <= m);
    CHECK(m < Rat(1));
  }
}

TEST_CASE("lcm64 and nearest_int behave on edge inputs") {
  CHECK(lcm64(4, 6) == 12);
  CHECK(lcm64(0, 5) == 0);
  CHECK(lcm64(7, 7) == 7);
  CHECK(nearest_int(2.5) == 3);
  CHECK(nearest_int(-2.5) == -3);
  CHECK(nearest_int(0.4999) == 0);
  CHECK(nearest_int(-0.5) == -1);
}

TEST_CASE("rat_from_double recovers small rationals and rejects irrationals") {
  auto half = rat_from_double(0.5);
  REQUIRE(half.has_value());
  CHECK(*half == Rat(1, 2));

  auto third = rat_from_double(1.0 / 3.0);
  REQUIRE(third.has_value());
  CHECK(*third == Rat(1, 3));

  auto neg = rat_from_double(-0.75);
  REQUIRE(neg.has_value());
  CHECK(*neg == Rat(-3, 4));

  auto big_den = rat_from_double(355.0 / 113.0, 1000);
  REQUIRE(big_den.has_value());
  CHECK(*big_den == Rat(355, 113));

  // No denominator <= 10000 approximates sqrt(2) to 1e-9.
  CHECK(!rat_from_double(1.4142135623730951, 10000, 1e-9).has_value());
  CHECK(!rat_from_double(std::numeric_limits<double>::infinity()).has_value());
  CHECK(!rat_from_double(std::numeric_limits<double>::quiet_NaN()).has_value());
}

// ---------------------------------------------------------------------------
// The sqrt(3) field
// ---------------------------------------------------------------------------

TEST_CASE("sqrt3 field arithmetic is exact and closed") {
  Q3 x{Rat(1), Rat(1)};    // 1 + sqrt3
  Q3 y{Rat(2), Rat(-1)};   // 2 - sqrt3
  CHECK(x * y == Q3{Rat(-1), Rat(1)});
  CHECK(x + y == Q3{Rat(3), Rat(0)});
  CHECK((x * y) / y == x);
  CHECK((-x) + x == Q3{});
  CHECK(Q3{Rat(0), Rat(1)} * Q3{Rat(0), Rat(1)} == Q3{Rat(3), Rat(0)});

  Q3 s3{Rat(0), Rat(1)};
  CHECK(s3.value() == doctest::Approx(1.7320508075688772).epsilon(1e-15));
  CHECK(!s3.is_rational());
  CHECK(Q3{Rat(5), Rat(0)}.is_rational());

  expect_errc(Errc::DegenerateLine, [] { Q3{Rat(1), Rat(0)} / Q3{}; });
}

TEST_CASE("exact trig table covers exactly the 30-degree grid") {
  auto at = [](Rat t) { return exact_cos_sin_pi(t); };

  auto quarter = at(Rat(1, 2));
  REQUIRE(quarter.has_value());
  CHECK(quarter->first == Q3{});
  CHECK(quarter->second == Q3{Rat(1)});

  auto sixth = at(Rat(1, 6));
  REQUIRE(sixth.has_value());
  CHECK(sixth->first == Q3{Rat(0), Rat(1, 2)});   // cos 30deg = sqrt3/2
  CHECK(sixth->second == Q3{Rat(1, 2), Rat(0)});  // sin 30deg = 1/2

  auto neg = at(Rat(-1, 3));
  REQUIRE(neg.has_value());
  CHECK(neg->first == Q3{Rat(1, 2), Rat(0)});
  CHECK(neg->second == Q3{Rat(0), Rat(-1, 2)});

  auto wrap = at(Rat(5, 3));  // same angle as -1/3
  REQUIRE(wrap.has_value());
  CHECK(wrap->first == neg->first);
  CHECK(wrap->second == neg->second);

  CHECK(!at(Rat(1, 4)).has_value());
  CHECK(!at(Rat(1, 5)).has_value());
  CHECK(!at(Rat(7, 12)).has_value());
}

TEST_CASE("exact trig values match the numeric functions") {
  for (int k = -12; k <= 12; ++k) {
    Rat t(k, 6);
    auto cs = exact_cos_sin_pi(t);
    REQUIRE(cs.has_value());
    double ang = t.value() * 3.14159265358979323846;
    CHECK(cs->first.value() == doctest::Approx(std::cos(ang)).epsilon(1e-12));
    CHECK(cs->second.value() == doctest::Approx(std::sin(ang)).epsilon(1e-12));
    // Pythagorean identity holds exactly in the field.
    Q3 c = cs->first, s = cs->second;
    CHECK(c * c + s * s == Q3{Rat(1)});
  }
}
