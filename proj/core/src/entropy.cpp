#include "contlim/entropy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "contlim/quadrature.hpp"

namespace contlim {

double eta(const Potential& pot, double rho, double u, double v) {
  return 0.5 * rho * v * v + pot.eval(u);
}

double eta_rel(const Potential& pot, double rho, double u, double v,
               double ubar, double vbar) {
  const double dv = v - vbar;
  return 0.5 * rho * dv * dv + relative_potential(pot, u, ubar);
}

double integrate_relative_entropy(const FieldPair& pair,
                                  const ReferenceSolution& ref,
                                  const Potential& pot, double rho, double t) {
  if (pair.u.cells() != pair.v.cells()) {
    throw std::invalid_argument("field pair has mismatched grids");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < pair.u.cells(); ++i) {
    const double u_cell = pair.u.value0(i);
    const double v_cell = pair.v.value0(i);
    total += gauss_panel<GaussRule5>(
        [&](double x) {
          const UV w = ref.evaluate(t, x);
          return eta_rel(pot, rho, u_cell, v_cell, w.u, w.v);
        },
        pair.u.edge(i), pair.u.edge(i + 1));
  }
  return total;
}

double gronwall_rate(const HypothesisReport& cert,
                     const LipschitzReport& ref) {
  return cert.quotient_bound * ref.dx_vbar;
}

double gronwall_slack(double h0, double disc_budget) {
  const double root = std::sqrt(h0) + std::sqrt(disc_budget);
  return root * root - h0;
}

GronwallResult gronwall_check(EntropyReport& report, double rate) {
  if (report.times.empty() || report.times.size() != report.H.size()) {
    throw std::invalid_argument("entropy report is empty or inconsistent");
  }
  report.gronwall_rate = rate;
  report.gronwall_seed = report.h0 + report.slack;
  report.bound.resize(report.times.size());
  report.margin.resize(report.times.size());

  GronwallResult res;
  res.pass = true;
  res.worst_margin = std::numeric_limits<double>::infinity();
  const double tol = 1e-12 * (1.0 + report.gronwall_seed);
  for (std::size_t i = 0; i < report.times.size(); ++i) {
    report.bound[i] = report.gronwall_seed * std::exp(rate * report.times[i]);
    report.margin[i] = report.bound[i] - report.H[i];
    if (report.margin[i] < res.worst_margin) {
      res.worst_margin = report.margin[i];
      res.worst_time = report.times[i];
    }
  }
  res.pass = res.worst_margin >= -tol;
  return res;
}

}  // namespace contlim
