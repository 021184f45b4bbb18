#include <cmath>
#include <vector>

#include "doctest.h"

#include "contlim/entropy.hpp"
#include "contlim/experiments.hpp"
#include "contlim/quadrature.hpp"

using namespace contlim;

namespace {

LatticeState sampled_state(int n, const InitialData& data, double rho = 1.0) {
  LatticeState s = make_rest_lattice(n, rho);
  for (int i = 0; i < n; ++i) {
    const double x = kTwoPi * static_cast<double>(i) / n;
    s.disp[static_cast<std::size_t>(i)] = data.y0(x) - x;
    s.vel[static_cast<std::size_t>(i)] = data.v0(x);
  }
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("entropy");

TEST_CASE("energy density at a potential minimum is zero") {
  const Potential pot = Potential::power_plus_quadratic(4.0, 1.0, 1.0);
  CHECK(eta(pot, 1.0, 0.0, 0.0) == 0.0);  // W(0) = 0 is the minimum
  CHECK(eta(pot, 2.0, 0.0, 3.0) == doctest::Approx(9.0));
}

TEST_CASE("summed energy density reproduces the lattice energy") {
  const Potential pot = Potential::power_plus_quadratic(4.0, 1.0, 1.0);
  InitialData data{0.07, 2};
  LatticeState s = sampled_state(64, data, 1.3);
  for (int i = 0; i < s.n; ++i) {
    s.vel[static_cast<std::size_t>(i)] = 0.02 * std::sin(3.0 * s.eps * i);
  }
  double sum = 0.0;
  for (int i = 0; i < s.n; ++i) {
    sum += s.eps * eta(pot, s.rho, strain(s, i), s.vel[static_cast<std::size_t>(i)]);
  }
  CHECK(sum == doctest::Approx(energy(s, pot)).epsilon(1e-15));
}

TEST_CASE("relative entropy density vanishes only on the diagonal") {
  const Potential pot = Potential::power_plus_quadratic(4.0, 1.0, 1.0);
  CHECK(eta_rel(pot, 1.0, 0.8, -0.3, 0.8, -0.3) == 0.0);
  CHECK(eta_rel(pot, 1.0, 0.8, -0.3, 0.8001, -0.3) > 0.0);
  CHECK(eta_rel(pot, 1.0, 0.8, -0.31, 0.8, -0.3) > 0.0);
}

TEST_CASE("quadratic potentials make the relative entropy exactly quadratic") {
  const double k = 2.5, rho = 1.7;
  const Potential pot = Potential::quadratic(k);
  for (double u : {0.4, 1.0, 1.9}) {
    for (double v : {-0.2, 0.5}) {
      const double expect =
          0.5 * rho * (v - 0.1) * (v - 0.1) + 0.5 * k * (u - 1.2) * (u - 1.2);
      CHECK(eta_rel(pot, rho, u, v, 1.2, 0.1) == doctest::Approx(expect));
    }
  }
}

TEST_CASE("relative entropy density matches the relative potential example") {
  const Potential pot = Potential::power_plus_quadratic(4.0, 1.0, 1.0);
  CHECK(eta_rel(pot, 1.0, 1.0, 0.0, 0.0, 0.0) == doctest::Approx(1.5));
}

TEST_CASE("integrated relative entropy against constant data is zero") {
  const LinearExactSolution ref(1.0, 1.0, 1.0, 0.3, {});
  const Potential pot = Potential::quadratic(1.0);
  LatticeState s = make_rest_lattice(32, 1.0);
  for (auto& v : s.vel) v = 0.3;
  const FieldPair pair = interpolate_pair(s);
  CHECK(integrate_relative_entropy(pair, ref, pot, 1.0, 0.0) ==
        doctest::Approx(0.0));
}

TEST_CASE("relative entropy is invariant under a common velocity shift") {
  const Potential pot = Potential::quadratic(1.0);
  const InitialData data{0.05, 1};
  LatticeState s = sampled_state(128, data);

  const auto ref0 = LinearExactSolution::single_cosine(1.0, 1.0, 1.0, 0.05, 1);
  const double h0 = integrate_relative_entropy(interpolate_pair(s), ref0, pot,
                                               1.0, 0.0);

  const double shift = 0.4;
  LinearExactSolution ref_shift(1.0, 1.0, 1.0, shift,
                                {{1, 0.05, 0.0, 0.0, 0.0}});
  for (auto& v : s.vel) v += shift;
  const double h_shift = integrate_relative_entropy(interpolate_pair(s),
                                                    ref_shift, pot, 1.0, 0.0);
  CHECK(h_shift == doctest::Approx(h0).epsilon(1e-9));
}

TEST_CASE("initialization entropy scales as eps squared") {
  const Potential pot = Potential::quadratic(1.0);
  const InitialData data{0.1, 1};
  const auto ref = LinearExactSolution::single_cosine(1.0, 1.0, 1.0, 0.1, 1);
  const double h_coarse = integrate_relative_entropy(
      interpolate_pair(sampled_state(128, data)), ref, pot, 1.0, 0.0);
  const double h_fine = integrate_relative_entropy(
      interpolate_pair(sampled_state(256, data)), ref, pot, 1.0, 0.0);
  CHECK(h_coarse > 0.0);
  CHECK(h_coarse / h_fine == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("integrated relative entropy dominates the squared distance") {
  const Potential pot =
      Potential::power_plus_quadratic(4.0, 1.0, 1.0, {0.0, 2.0});
  const double rho = 1.0;
  const auto ref = LinearExactSolution::single_cosine(13.0, rho, 1.0, 0.04, 1);
  InitialData data{0.04, 1};
  LatticeState s = sampled_state(256, data);
  for (int i = 0; i < s.n; ++i) {
    s.vel[static_cast<std::size_t>(i)] += 0.01 * std::cos(2.0 * s.eps * i);
  }
  const FieldPair pair = interpolate_pair(s);
  const double H = integrate_relative_entropy(pair, ref, pot, rho, 0.0);
  CHECK(H >= 0.0);

  // c0-weighted squared L2 distance, same quadrature
  const double c0 = pot.convexity_lower_bound();
  double dist2 = 0.0;
  for (std::size_t i = 0; i < pair.u.cells(); ++i) {
    dist2 += gauss_panel<GaussRule5>(
        [&](double x) {
          const UV w = ref.evaluate(0.0, x);
          const double du = pair.u.value0(i) - w.u;
          const double dv = pair.v.value0(i) - w.v;
          return du * du + dv * dv;
        },
        pair.u.edge(i), pair.u.edge(i + 1));
  }
  CHECK(H >= 0.5 * std::min(c0, rho) * dist2 * (1.0 - 1e-9));
}

TEST_CASE("gronwall rate assembles certificates") {
  const Potential quad = Potential::quadratic(1.0);
  const HypothesisReport cert = quad.verify_hypotheses();
  LipschitzReport lip;
  lip.dx_vbar = 0.7;
  // quadratic potential: zero quotient, so zero rate
  CHECK(gronwall_rate(cert, lip) == doctest::Approx(0.0).epsilon(1e-9));

  const Potential ppq = Potential::power_plus_quadratic(4.0, 1.0, 1.0, {0.0, 2.0});
  const HypothesisReport cert2 = ppq.verify_hypotheses();
  CHECK(gronwall_rate(cert2, lip) ==
        doctest::Approx(cert2.quotient_bound * 0.7));
}

TEST_CASE("gronwall check flags violations and accepts bounded series") {
  EntropyReport rep;
  rep.times = {0.0, 0.5, 1.0};
  rep.H = {1.0, 1.2, 1.4};
  rep.h0 = 1.0;
  rep.slack = 0.0;
  const GronwallResult ok = gronwall_check(rep, 0.4);  // e^{0.4 t} covers 1.4x
  CHECK(ok.pass);
  CHECK(rep.bound.size() == 3);
  CHECK(rep.margin[0] == doctest::Approx(0.0));

  EntropyReport bad = rep;
  const GronwallResult fail = gronwall_check(bad, 0.0);
  CHECK_FALSE(fail.pass);
  CHECK(fail.worst_margin == doctest::Approx(-0.4));
  CHECK(fail.worst_time == doctest::Approx(1.0));
}

TEST_CASE("slack inflates the seed through the triangle inequality") {
  const double h0 = 1e-4, budget = 1e-6;
  const double slack = gronwall_slack(h0, budget);
  const double seed = h0 + slack;
  CHECK(seed == doctest::Approx(std::pow(std::sqrt(h0) + std::sqrt(budget), 2.0)));
  CHECK(slack > 2.0 * std::sqrt(h0 * budget) * 0.99);
  CHECK(gronwall_slack(h0, 0.0) == doctest::Approx(0.0));
}

TEST_SUITE_END();
