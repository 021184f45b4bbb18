#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "contlim/potential.hpp"

using namespace contlim;

namespace {

// independent central-difference oracle for first derivatives
double fd1(const Potential& pot, double u, double h) {
  return (pot.eval(u + h) - pot.eval(u - h)) / (2.0 * h);
}

Potential shifted_quadratic(double k) {
  // W(u) = k (u-1)^2 / 2, W(1) = 0
  Potential::Callables f;
  f.eval = [k](double u) { return 0.5 * k * (u - 1.0) * (u - 1.0); };
  f.d1 = [k](double u) { return k * (u - 1.0); };
  f.d2 = [k](double) { return k; };
  return Potential::custom(f, 2.0, k, 0.25 * k, k, {-4.0, 6.0});
}

}  // namespace

TEST_SUITE_BEGIN("potential");

TEST_CASE("quadratic evaluation") {
  const Potential pot = Potential::quadratic(1.0);
  CHECK(pot.eval(0.0) == 0.0);
  CHECK(pot.eval(2.0) == 2.0);
  CHECK(pot.d1(3.0) == 3.0);
  CHECK(pot.d2(3.0) == 1.0);
}

TEST_CASE("power-plus-quadratic evaluation") {
  const Potential pot = Potential::power_plus_quadratic(4.0, 1.0, 1.0);
  CHECK(pot.eval(1.0) == doctest::Approx(1.5));
  CHECK(pot.d1(1.0) == doctest::Approx(5.0));  // 4 a u^3 + b u
  CHECK(pot.d2(0.0) == doctest::Approx(1.0));
  CHECK(pot.d2(1.0) == doctest::Approx(13.0));
  // even energy, odd first derivative
  CHECK(pot.eval(-1.0) == doctest::Approx(pot.eval(1.0)));
  CHECK(pot.d1(-1.0) == doctest::Approx(-pot.d1(1.0)));
}

TEST_CASE("non-finite input is a domain error") {
  const Potential pot = Potential::quadratic(1.0);
  CHECK_THROWS_AS(pot.eval(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(pot.d1(std::numeric_limits<double>::infinity()),
                  std::domain_error);
}

TEST_CASE("construction rejects bad parameters") {
  CHECK_THROWS_AS(Potential::quadratic(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Potential::power_plus_quadratic(1.5, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(Potential::power_plus_quadratic(4.0, -1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("closed-form derivatives match the finite-difference oracle") {
  const std::vector<Potential> pots = {
      Potential::quadratic(2.0),
      Potential::power_plus_quadratic(4.0, 1.0, 1.0),
      Potential::power_plus_quadratic(3.0, 0.5, 2.0),
      shifted_quadratic(1.0),
  };
  const double h = 1e-5;
  for (const auto& pot : pots) {
    for (double u : {-2.0, -0.7, 0.31, 1.0, 2.5}) {
      const double exact = pot.d1(u);
      const double approx = fd1(pot, u, h);
      const double scale = std::max(1.0, std::abs(exact));
      CHECK(std::abs(approx - exact) / scale < 1e-8);
    }
  }
}

TEST_CASE("derivative error shrinks quadratically under Richardson refinement") {
  const Potential pot = Potential::power_plus_quadratic(4.0, 1.0, 1.0);
  const double u = 0.8;
  const double e1 = std::abs(fd1(pot, u, 1e-2) - pot.d1(u));
  const double e2 = std::abs(fd1(pot, u, 5e-3) - pot.d1(u));
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("relative potential basics") {
  const Potential quad = Potential::quadratic(1.0);
  CHECK(relative_potential(quad, 1.7, 1.7) == 0.0);
  CHECK(relative_potential(quad, 2.0, 0.0) == doctest::Approx(2.0));
  const Potential ppq = Potential::power_plus_quadratic(4.0, 1.0, 1.0);
  // direct evaluation of W(1) - W(0) - W'(0)(1 - 0)
  CHECK(relative_potential(ppq, 1.0, 0.0) == doctest::Approx(1.5));
}

TEST_CASE("convexity gap brackets the relative potential") {
  const Potential pot =
      Potential::power_plus_quadratic(4.0, 1.0, 1.0, {-2.0, 2.0});
  const double c0 = pot.convexity_lower_bound();
  const double d2max = pot.max_d2_on(pot.certified_interval());
  for (int i = 0; i <= 20; ++i) {
    const double m = -2.0 + 4.0 * i / 20.0;
    for (int j = 0; j <= 20; ++j) {
      const double ub = -2.0 + 4.0 * j / 20.0;
      const double rel = relative_potential(pot, m, ub);
      const double gap = m - ub;
      CHECK(rel >= 0.5 * c0 * gap * gap - 1e-12);
      CHECK(rel <= 0.5 * d2max * gap * gap + 1e-12);
    }
  }
}

TEST_CASE("even potentials have symmetric relative potential") {
  const Potential pot = Potential::power_plus_quadratic(4.0, 1.0, 1.0);
  for (double m : {-1.5, 0.2, 2.0}) {
    for (double ub : {-0.9, 0.4, 1.3}) {
      CHECK(relative_potential(pot, m, ub) ==
            doctest::Approx(relative_potential(pot, -m, -ub)));
    }
  }
}

TEST_CASE("hypothesis certificate for builtin kinds") {
  const HypothesisReport quad =
      Potential::quadratic(2.0, {-5.0, 5.0}).verify_hypotheses();
  CHECK(quad.pass);
  CHECK(quad.min_d2 == doctest::Approx(2.0));
  CHECK(quad.coercivity_margin >= -1e-12);
  // the quadratic Taylor expansion is exact, so the quotient vanishes
  CHECK(quad.quotient_bound == doctest::Approx(0.0).epsilon(1e-9));

  const HypothesisReport ppq =
      Potential::power_plus_quadratic(4.0, 1.0, 0.5, {-3.0, 3.0})
          .verify_hypotheses();
  CHECK(ppq.pass);
  CHECK(ppq.min_d2 == doctest::Approx(0.5));  // 12 a u^2 + b at u = 0
  CHECK(ppq.quotient_bound > 0.0);
  CHECK(std::isfinite(ppq.quotient_bound));
}

TEST_CASE("superlinearity ratio is recorded and decays with the interval") {
  const Potential pot = Potential::power_plus_quadratic(4.0, 1.0, 1.0);
  const HypothesisReport narrow = pot.verify_hypotheses({-5.0, 5.0}, 513);
  const HypothesisReport wide = pot.verify_hypotheses({-50.0, 50.0}, 513);
  // W'(u)/|u|^p ~ 4a/|u| -> 0 as |u| grows
  CHECK(std::abs(wide.superlinearity_hi) < std::abs(narrow.superlinearity_hi));
  CHECK(std::abs(wide.superlinearity_lo) < std::abs(narrow.superlinearity_lo));
}

TEST_CASE("degenerate convexity at the origin fails verification") {
  // W(u) = u^4: W''(0) = 0 violates the declared positive lower bound
  Potential::Callables f;
  f.eval = [](double u) { return u * u * u * u; };
  f.d1 = [](double u) { return 4.0 * u * u * u; };
  f.d2 = [](double u) { return 12.0 * u * u; };
  const Potential pot = Potential::custom(f, 4.0, 0.1, 1.0, 0.0, {-1.0, 1.0});
  const HypothesisReport rep = pot.verify_hypotheses({-1.0, 1.0}, 257);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.failure.empty());
  CHECK(rep.min_d2 == doctest::Approx(0.0));
}

TEST_CASE("quotient bound controls the flux error on a wide grid") {
  const Potential pot =
      Potential::power_plus_quadratic(4.0, 1.0, 1.0, {0.0, 2.0});
  const HypothesisReport rep = pot.verify_hypotheses();
  REQUIRE(rep.pass);
  // re-check the certified inequality on an independent sample
  for (int i = 0; i <= 40; ++i) {
    const double m = -10.0 + 22.0 * i / 40.0;
    for (int j = 1; j < 10; ++j) {
      const double ub = 2.0 * j / 10.0;
      const double rel = relative_potential(pot, m, ub);
      if (rel < 1e-12) continue;
      const double num =
          std::abs(pot.d1(m) - pot.d1(ub) - pot.d2(ub) * (m - ub));
      CHECK(num <= rep.quotient_bound * rel * (1.0 + 1e-9));
    }
  }
}

TEST_SUITE_END();
