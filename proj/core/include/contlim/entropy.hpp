#pragma once

#include <cstddef>
#include <vector>

#include "contlim/fields.hpp"
#include "contlim/potential.hpp"
#include "contlim/reference.hpp"

namespace contlim {

// Mechanical energy density eta(u, v) = rho/2 v^2 + W(u).
double eta(const Potential& pot, double rho, double u, double v);

// Relative entropy density: second-order Taylor remainder of eta about
// (ubar, vbar). Nonnegative; zero iff (u, v) = (ubar, vbar) for strictly
// convex W.
double eta_rel(const Potential& pot, double rho, double u, double v,
               double ubar, double vbar);

// H(t) = int_Q eta_rel(u_cell, v_cell, ubar(t, X), vbar(t, X)) dX.
// The lattice side is piecewise constant (exact); the reference side is
// integrated with a fixed 5-point Gauss rule per cell.
double integrate_relative_entropy(const FieldPair& pair,
                                  const ReferenceSolution& ref,
                                  const Potential& pot, double rho, double t);

// Gronwall rate assembled from certificates: the potential's quotient bound
// times the sup of |d vbar / dX|. The flux error obeys |Z| <= quotient * h,
// so d/dt int h <= rate * int h along the continuum estimate.
double gronwall_rate(const HypothesisReport& cert, const LipschitzReport& ref);

// Seed inflation for the verified bound H(t) <= (H(0) + slack) e^{rate t}:
// the discretization budget B enters through the triangle inequality,
// slack = (sqrt(H0) + sqrt(B))^2 - H0.
double gronwall_slack(double h0, double disc_budget);

// Time series of the relative entropy along a run, with the certified
// exponential bound and its margins.
struct EntropyReport {
  std::vector<double> times;
  std::vector<double> H;       // int eta_rel at each sample
  std::vector<double> E;       // lattice energy at each sample
  std::vector<double> bound;   // (H0 + slack) e^{rate t}
  std::vector<double> margin;  // bound - H
  double h0 = 0.0;
  double slack = 0.0;
  double gronwall_seed = 0.0;  // h0 + slack
  double gronwall_rate = 0.0;
};

struct GronwallResult {
  bool pass = false;
  double worst_margin = 0.0;
  double worst_time = 0.0;
};

// Fills bound/margin from the report's seed and the given rate; passes when
// every margin is nonnegative (up to roundoff on the seed scale).
GronwallResult gronwall_check(EntropyReport& report, double rate);

}  // namespace contlim
