#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "contlim/fields.hpp"
#include "contlim/potential.hpp"

namespace contlim {

struct UV {
  double u = 0.0;
  double v = 0.0;
};

struct LipschitzReport {
  double dx_ubar = 0.0;
  double dx_vbar = 0.0;
  double dt_ubar = 0.0;
  double dt_vbar = 0.0;

  double max() const;
};

// A classical (Lipschitz) solution (ubar, vbar) of the continuum system
//   rho v_t = W'(u)_X,  u_t = v_X
// on Q x [0, t_max_classical], used as the strong side of weak-strong
// comparisons. Immutable after construction; evaluate is pure.
class ReferenceSolution {
 public:
  virtual ~ReferenceSolution() = default;

  virtual UV evaluate(double t, double x) const = 0;
  virtual double t_max_classical() const = 0;
  virtual LipschitzReport lipschitz() const = 0;

 protected:
  void check_horizon(double t) const;
};

double lipschitz_norm(const ReferenceSolution& ref);

// One Fourier mode of initial data: u0 += u_cos cos(mX) + u_sin sin(mX),
// v0 += v_cos cos(mX) + v_sin sin(mX).
struct WaveMode {
  int m = 1;
  double u_cos = 0.0, u_sin = 0.0;
  double v_cos = 0.0, v_sin = 0.0;
};

// Exact solution of the linear system rho v_t = k u_X, u_t = v_X (the
// modulus-k wave equation in first-order form), evolved mode by mode.
class LinearExactSolution final : public ReferenceSolution {
 public:
  LinearExactSolution(double k, double rho, double mean_u, double mean_v,
                      std::vector<WaveMode> modes);

  // u0 = mean_u + amplitude * cos(mode X), v0 = 0.
  static LinearExactSolution single_cosine(double k, double rho, double mean_u,
                                           double amplitude, int mode);

  UV evaluate(double t, double x) const override;
  UV x_derivative(double t, double x) const;
  UV t_derivative(double t, double x) const;

  double t_max_classical() const override {
    return std::numeric_limits<double>::infinity();
  }
  LipschitzReport lipschitz() const override;

  double modulus() const { return k_; }
  double density() const { return rho_; }
  double mean_u() const { return mean_u_; }

  double initial_u(double x) const { return evaluate(0.0, x).u; }
  double initial_v(double x) const { return evaluate(0.0, x).v; }
  // y0 with dy0/dX = u0 and y0(0) = 0
  double initial_position(double x) const;

 private:
  double k_ = 1.0, rho_ = 1.0;
  double mean_u_ = 1.0, mean_v_ = 0.0;
  std::vector<WaveMode> modes_;
};

// Classical-lifespan estimate for smooth data (u0, v0) under the given
// potential: 1 / sup |c'(u0)| (|u0'| + |v0'|/c(u0)) with c = sqrt(W''/rho),
// halved for safety. Infinite for constant data. A gradient-steepening
// heuristic only; oracle runs validate it a posteriori against a cap on the
// discrete Lipschitz norm.
double classical_horizon_estimate(const FieldPair& data0, const Potential& pot,
                                  double rho);

// Reference produced by a fine-lattice run: stores (u, v) field snapshots at
// the sampled times and evaluates by linear interpolation in t. Lipschitz
// norms come from finite differences over the stored trajectory.
class FineLatticeOracle final : public ReferenceSolution {
 public:
  struct Options {
    double cfl_fraction = 0.5;
    // run aborts (horizon_error) if the discrete Lipschitz norm exceeds this
    double lipschitz_cap = 50.0;
    double t_max_hint = std::numeric_limits<double>::infinity();
    int time_samples = 32;  // snapshots stored per run
  };

  static FineLatticeOracle from_lattice_run(LatticeState initial,
                                            const Potential& pot, double t_end,
                                            const Options& opt);

  UV evaluate(double t, double x) const override;
  double t_max_classical() const override { return t_max_; }
  LipschitzReport lipschitz() const override { return lipschitz_; }

  int n_ref() const { return n_ref_; }
  double eps_ref() const { return kTwoPi / n_ref_; }
  const std::vector<double>& snapshot_times() const { return times_; }
  const FieldPair& snapshot(std::size_t i) const { return snaps_[i]; }
  // end state of the generating run, checkpointable in the lattice format
  const LatticeState& final_state() const { return final_state_; }

 private:
  FineLatticeOracle() = default;

  int n_ref_ = 0;
  double t_max_ = 0.0;
  std::vector<double> times_;
  std::vector<FieldPair> snaps_;
  LatticeState final_state_{};
  LipschitzReport lipschitz_{};
};

// Smooth space-time probe phi(t, X) = theta(t) psi(X) with theta C^1,
// theta(t) = 0 for t >= t_support, and psi 2*pi-periodic.
struct SpaceTimeTestFunction {
  std::function<double(double)> theta;
  std::function<double(double)> theta_dot;
  std::function<double(double)> psi;
  std::function<double(double)> psi_prime;
  double t_support = 1.0;
};

// theta(t) = (1 - t/t_support)^2, psi = cos(mode X) or sin(mode X)
// (constant 1 for mode 0).
SpaceTimeTestFunction trig_test_function(int mode, bool sine,
                                         double t_support);

// Momentum-equation weak-form residual of the reference against W':
//   int int [rho phi_t vbar - phi_X W'(ubar)] dX dt
//     + int phi(0, X) rho vbar(0, X) dX
// via composite Gauss quadrature. Near zero certifies the reference solves
// the continuum equations for this potential; the sign convention matches
// the summation-by-parts form of the lattice equations.
double weak_form_residual(const ReferenceSolution& ref, const Potential& pot,
                          double rho, const SpaceTimeTestFunction& phi,
                          int x_panels = 64, int t_panels = 64);

}  // namespace contlim
