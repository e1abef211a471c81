#include <catch_amalgamated.hpp>

#include <cmath>

#include "gagliardo/fields.hpp"

using namespace gagliardo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Rational normalizes and parses", "[fields]") {
  const Rational a(6, -8);
  CHECK(a.num() == -3);
  CHECK(a.den() == 4);
  CHECK(Rational::parse("3/4") == Rational(3, 4));
  CHECK(Rational::parse("0.75") == Rational(3, 4));
  CHECK(Rational::parse("2") == Rational(2));
  CHECK(Rational::parse("-1.5") == Rational(-3, 2));
  CHECK(Rational(1, 3).str() == "1/3");
  CHECK(Rational(4, 2).str() == "2");
  CHECK_THROWS_AS(Rational(1, 0), Error);
  CHECK_THROWS_AS(Rational::parse("x"), Error);
  CHECK_THROWS_AS(Rational::parse(""), Error);
  CHECK(Rational(1, 2) * Rational(4) == Rational(2));
  CHECK(Rational(1, 3) < Rational(1, 2));
}

TEST_CASE("Regime is decided exactly", "[fields]") {
  CHECK(SeminormParams(1, Rational(1, 2), Rational(2)).regime().regime == Regime::conformal);
  CHECK(SeminormParams(2, Rational(2, 3), Rational(3)).regime().regime == Regime::conformal);
  CHECK(SeminormParams(1, Rational(1, 4), Rational(2)).regime().regime == Regime::subconformal);
  CHECK(SeminormParams(1, Rational(3, 4), Rational(2)).regime().regime == Regime::superconformal);
  CHECK(SeminormParams(1, Rational(1), Rational(1)).regime().exceptional_1d);
  CHECK_FALSE(SeminormParams(2, Rational(1), Rational(2)).regime().exceptional_1d);
}

TEST_CASE("Critical and Holder exponents", "[fields]") {
  CHECK(SeminormParams(1, Rational(1, 2), Rational(1)).critical_exponent() == Rational(2));
  CHECK(SeminormParams(1, Rational(1, 4), Rational(2)).critical_exponent() == Rational(4));
  CHECK(SeminormParams(1, Rational(3, 4), Rational(2)).holder_exponent() == Rational(1, 4));
  CHECK_THROWS_AS(SeminormParams(1, Rational(1, 2), Rational(2)).critical_exponent(), Error);
  CHECK_THROWS_AS(SeminormParams(1, Rational(1, 2), Rational(2)).holder_exponent(), Error);
}

TEST_CASE("SeminormParams rejects bad input", "[fields]") {
  CHECK_THROWS_AS(SeminormParams(3, Rational(1, 2), Rational(2)), Error);
  CHECK_THROWS_AS(SeminormParams(1, Rational(0), Rational(2)), Error);
  CHECK_THROWS_AS(SeminormParams(1, Rational(3, 2), Rational(2)), Error);
  CHECK_THROWS_AS(SeminormParams(1, Rational(1, 2), Rational(1, 2)), Error);
}

TEST_CASE("Unit ball measures", "[fields]") {
  CHECK(omega(1) == 2.0);
  CHECK_THAT(omega(2), WithinRel(M_PI, 1e-15));
  CHECK_THAT(ball_measure(2, 2.0), WithinRel(4 * M_PI, 1e-15));
}

TEST_CASE("Catalog fields evaluate as declared", "[fields]") {
  const ScalarField hat = hat_field(1);
  CHECK(hat({0.0, 0.0}) == 1.0);
  CHECK(hat({0.5, 0.0}) == 0.5);
  CHECK(hat({2.0, 0.0}) == 0.0);
  const ScalarField hat2 = hat_field(2);
  CHECK_THAT(hat2({0.3, 0.4}), WithinAbs(0.5, 1e-15));
  CHECK_THAT(gauss_field(1)({1.0, 0.0}), WithinRel(std::exp(-1.0), 1e-15));
  CHECK(bump_field(1)({1.5, 0.0}) == 0.0);
  CHECK(plateau_field(2)({0.5, 0.5}) == 1.0);
  CHECK(plateau_field(2)({2.5, 0.0}) == 0.0);
  CHECK(sign_field()({-3.0, 0.0}) == -1.0);
  CHECK(clamp_field()({5.0, 0.0}) == 1.0);
  CHECK(clamp_field()({-5.0, 0.0}) == -1.0);
  CHECK(constant_field(2, 3.0)({7.0, -1.0}) == 3.0);
  CHECK(growpow_field(1, 0.5)({0.0, 0.0}) == 0.0);
  const ScalarField pt = powtail_field(1, 0.75);
  CHECK(pt.tail.kind == DecayKind::polynomial);
  CHECK(pt.tail.rate == 0.75);
}

TEST_CASE("Declared gradients match finite differences", "[fields]") {
  for (int n : {1, 2}) {
    for (const ScalarField& u : catalog(n)) {
      if (!u.grad) continue;
      const Point x{0.37, n == 2 ? -0.21 : 0.0};
      const double h = 1e-6;
      const Point g = (*u.grad)(x);
      for (int i = 0; i < n; ++i) {
        Point e{0.0, 0.0};
        e[i] = h;
        const double fd = (u(x + e) - u(x - e)) / (2 * h);
        INFO(u.label << " n=" << n << " i=" << i);
        CHECK_THAT(g[i], WithinAbs(fd, 1e-6));
      }
    }
  }
}

TEST_CASE("Catalog contents and labels round-trip", "[fields]") {
  const auto c1 = catalog(1);
  const auto c2 = catalog(2);
  CHECK(c1.size() == c2.size() + 2);
  for (int n : {1, 2}) {
    for (const ScalarField& u : catalog(n)) {
      const ScalarField v = field_from_label(u.label, n);
      CHECK(v.label == u.label);
      CHECK(v.dim == n);
      const Point x{0.3, n == 2 ? 0.7 : 0.0};
      CHECK(v(x) == u(x));
    }
  }
  CHECK_THROWS_AS(field_from_label("nosuch", 1), Error);
  CHECK_THROWS_AS(field_from_label("sign", 2), Error);
  CHECK_THROWS_AS(field_from_label("powtail:alpha", 1), Error);
}

TEST_CASE("Algebra propagates tails", "[fields]") {
  const ScalarField h = hat_field(1), g = gauss_field(1), p = powtail_field(1, 0.5);
  CHECK(add(h, g).tail.kind == DecayKind::rapid);
  CHECK(add(h, h).tail.kind == DecayKind::compact);
  CHECK(add(p, h).tail.kind == DecayKind::polynomial);
  CHECK(add(p, linear_field(1)).tail.kind == DecayKind::none);
  CHECK(multiply(h, p).tail.kind == DecayKind::compact);
  CHECK(multiply(p, p).tail.rate == 1.0);
  const ScalarField c = add_constant(h, 2.0);
  CHECK(c.tail.kind == DecayKind::flat);
  CHECK(c.tail.above == 2.0);
  CHECK(c({0.0, 0.0}) == 3.0);
  const ScalarField t = translate(h, {1.0, 0.0});
  CHECK(t({1.0, 0.0}) == 1.0);
  CHECK(scalar_multiple(h, -2.0)({0.0, 0.0}) == -2.0);
  CHECK_THROWS_AS(add(h, hat_field(2)), Error);
}

TEST_CASE("Smooth step is monotone with unit range", "[fields]") {
  CHECK(smooth_step(-0.5) == 0.0);
  CHECK(smooth_step(1.5) == 1.0);
  double prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double v = smooth_step(i / 100.0);
    CHECK(v >= prev);
    prev = v;
  }
  for (int i = 0; i <= 100; ++i) CHECK(smooth_step_derivative(i / 100.0) <= 2.0 + 1e-12);
}
