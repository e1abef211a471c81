#include <catch_amalgamated.hpp>

#include <cmath>

#include "gagliardo/constructions.hpp"
#include "gagliardo/seminorms.hpp"

using namespace gagliardo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SeminormParams prm(int n, int sn, int sd, int p) { return SeminormParams(n, Rational(sn, sd), Rational(p)); }

}  // namespace

TEST_CASE("Gagliardo seminorm of the hat matches the oracle", "[seminorms][oracle]") {
  const double v = gagliardo_seminorm(hat_field(1), prm(1, 1, 2, 2), default_spec(1)).value();
  CHECK_THAT(v, WithinRel(std::sqrt(0.25 * 5.5451774444795624753), 1e-8));
}

TEST_CASE("s = 1 uses the declared gradient", "[seminorms]") {
  const SeminormValue v = gagliardo_seminorm(hat_field(1), prm(1, 1, 1, 2), default_spec(1));
  CHECK(v.kind == SeminormKind::gradient_lp);
  CHECK_THAT(v.value(), WithinRel(std::sqrt(2.0), 1e-10));
  CHECK_THROWS_AS(gagliardo_seminorm(sign_field(), prm(1, 1, 1, 1), default_spec(1)), Error);
}

TEST_CASE("Scaling law for the hat", "[seminorms][property]") {
  const QuadratureSpec spec = default_spec(1);
  for (auto [sn, sd, p] : {std::tuple{1, 2, 2}, {3, 4, 2}, {1, 4, 3}}) {
    const SeminormParams q = prm(1, sn, sd, p);
    const double base = gagliardo_seminorm(hat_field(1), q, spec).value();
    for (double lambda : {0.5, 2.0, 4.0}) {
      const double v = gagliardo_seminorm(scale(hat_field(1), lambda), q, spec).value();
      CHECK_THAT(v / base, WithinRel(std::pow(lambda, q.s() - 1.0 / q.p()), 1e-6));
    }
  }
}

TEST_CASE("Constants are annihilated", "[seminorms][invariant]") {
  for (int n : {1, 2}) {
    const QuadratureSpec spec = default_spec(n);
    const ScalarField c = constant_field(n, 3.5);
    CHECK(gagliardo_seminorm(c, prm(n, 1, 2, 2), spec).value() == 0.0);
    CHECK(campanato_seminorm(c, 2, n, spec).value() == 0.0);
    CHECK(bmo_seminorm(c, spec).value() == 0.0);
    CHECK(holder_seminorm(c, 0.5, spec).value() == 0.0);
    // Adding a constant leaves the seminorm unchanged.
    const double a = gagliardo_seminorm(hat_field(n), prm(n, 1, 2, 2), spec).value();
    const double b = gagliardo_seminorm(add_constant(hat_field(n), 3.5), prm(n, 1, 2, 2), spec).value();
    if (n == 1) {
      CHECK_THAT(b, WithinRel(a, 1e-10));
    } else {
      CHECK(std::abs(a - b) < 0.05 * a);
    }
  }
}

TEST_CASE("Positive homogeneity", "[seminorms][invariant]") {
  const QuadratureSpec spec = default_spec(1);
  const ScalarField u = gauss_field(1);
  for (double c : {-3.0, 0.5, 2.0}) {
    const ScalarField v = scalar_multiple(u, c);
    const SeminormParams q = prm(1, 3, 4, 2);
    CHECK_THAT(gagliardo_seminorm(v, q, spec).value(),
               WithinRel(std::abs(c) * gagliardo_seminorm(u, q, spec).value(), 1e-10));
    CHECK_THAT(campanato_seminorm(v, 2, 1.5, spec).value(),
               WithinRel(std::abs(c) * campanato_seminorm(u, 2, 1.5, spec).value(), 1e-10));
    CHECK_THAT(holder_seminorm(v, 0.25, spec).value(),
               WithinRel(std::abs(c) * holder_seminorm(u, 0.25, spec).value(), 1e-10));
  }
}

TEST_CASE("Triangle inequality", "[seminorms][invariant]") {
  const QuadratureSpec spec = default_spec(1);
  const SeminormParams q = prm(1, 1, 2, 2);
  const ScalarField u = hat_field(1), v = translate(gauss_field(1), {0.7, 0.0});
  const double lhs = gagliardo_seminorm(add(u, v), q, spec).value();
  const double rhs = gagliardo_seminorm(u, q, spec).value() + gagliardo_seminorm(v, q, spec).value();
  CHECK(lhs <= rhs * (1 + 1e-9));
}

TEST_CASE("Translation invariance", "[seminorms][invariant]") {
  const QuadratureSpec spec = default_spec(1);
  const SeminormParams q = prm(1, 3, 4, 2);
  for (const ScalarField& u : {hat_field(1), bump_field(1), powtail_field(1, 0.75)}) {
    const double a = gagliardo_seminorm(u, q, spec).value();
    const double b = gagliardo_seminorm(translate(u, {1.3, 0.0}), q, spec).value();
    INFO(u.label);
    CHECK_THAT(b, WithinRel(a, 1e-6));
  }
}

TEST_CASE("BMO of sign and Campanato closed forms", "[seminorms][oracle]") {
  const QuadratureSpec spec = default_spec(1);
  CHECK_THAT(campanato_seminorm(sign_field(), 1, 1, spec).value(), WithinRel(2.0, 1e-9));
  CHECK_THAT(bmo_seminorm(sign_field(), spec).value(), WithinRel(1.0, 1e-9));
  const SeminormValue b = bmo_seminorm(hat_field(2), default_spec(2));
  CHECK_THAT(b.value(), WithinRel(campanato_seminorm(hat_field(2), 1, 2, default_spec(2)).value() / M_PI, 1e-12));
}

TEST_CASE("Holder seminorm of the hat", "[seminorms]") {
  CHECK_THAT(holder_seminorm(hat_field(1), 1.0, default_spec(1)).value(), WithinAbs(1.0, 1e-9));
  CHECK_THAT(holder_seminorm(hat_field(2), 1.0, default_spec(2)).value(), WithinAbs(1.0, 1e-6));
  // |x|^{1/2} near the apex: quotient peaks at the kink for alpha < 1.
  CHECK(holder_seminorm(hat_field(1), 0.5, default_spec(1)).value() >= 1.0);
  CHECK_THROWS_AS(holder_seminorm(hat_field(1), 1.5, default_spec(1)), Error);
}

TEST_CASE("Mean versus best constant", "[seminorms][invariant]") {
  for (int n : {1, 2}) {
    const QuadratureSpec spec = default_spec(n);
    for (const ScalarField& u : catalog(n)) {
      for (double p : {1.0, 2.0}) {
        const Ball b({0.2, 0.1 * (n - 1)}, 1.3);
        const double osc = oscillation(u, b, p, spec);
        double best = osc;
        for (int k = -40; k <= 40; ++k) best = std::min(best, deviation(u, b, p, 0.05 * k, spec));
        INFO(u.label << " n=" << n << " p=" << p);
        CHECK(best <= osc * (1 + 1e-12));
        CHECK(osc <= std::pow(2.0, p) * best * (1 + 1e-12) + 1e-14);
      }
    }
  }
}

TEST_CASE("Weighted integral requires zero mean", "[seminorms]") {
  const QuadratureSpec spec = default_spec(1);
  CHECK_THROWS_AS(weighted_campanato_integral(hat_field(1), 1, 1, spec), Error);
  CHECK_THAT(weighted_campanato_integral(sign_field(), 1, 1, spec).value, WithinRel(4.8113865157505477618, 1e-6));
  const double m = mean_on_ball(hat_field(1), Ball({0, 0}, 1), spec);
  CHECK_THAT(m, WithinRel(0.5, 1e-12));
  CHECK_NOTHROW(weighted_campanato_integral(hat_field(1), 1, 1, spec, m));
}

TEST_CASE("Campanato argument validation", "[seminorms]") {
  CHECK_THROWS_AS(campanato_seminorm(hat_field(1), 0.5, 1, default_spec(1)), Error);
  CHECK_THROWS_AS(campanato_seminorm(hat_field(1), 2, 3.5, default_spec(1)), Error);
}

TEST_CASE("Resolution refinement leaves tensor seminorms stable", "[seminorms][property]") {
  const QuadratureSpec spec = default_spec(1);
  for (const ScalarField& u : {hat_field(1), bump_field(1), plateau_field(1), clamp_field()}) {
    const SeminormParams q = prm(1, 3, 4, 2);
    const double a = gagliardo_seminorm(u, q, spec).value();
    const double b = gagliardo_seminorm(u, q, refined(spec, 4)).value();
    INFO(u.label);
    CHECK_THAT(b, WithinRel(a, 1e-3));
  }
}
