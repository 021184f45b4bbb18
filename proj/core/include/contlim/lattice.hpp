#pragma once

#include <functional>
#include <span>
#include <vector>

#include "contlim/potential.hpp"

namespace contlim {

inline constexpr double kTwoPi = 6.2831853071795864769;

// N point masses on the periodic circle of circumference 2*pi, connected by
// nearest-neighbour springs. Particle i has reference location X_i = eps*i
// with eps = 2*pi/N; positions are stored as displacements d_i = x_i - X_i,
// which makes the configuration winding-free: the wrap-around bond uses
// d_0 - d_{N-1} and the periodic continuation x_{i+N} = x_i + 2*pi holds by
// construction.
struct LatticeState {
  int n = 0;
  double eps = 0.0;  // 2*pi / n
  double rho = 1.0;  // mass density; each particle has mass eps*rho
  double t = 0.0;
  std::vector<double> disp;
  std::vector<double> vel;
};

// All displacements and velocities zero; strain is 1 at every bond.
LatticeState make_rest_lattice(int n, double rho);

// Strain of bond i (between particles i and i+1 mod N):
// (x_{i+1} - x_i)/eps = (d_{i+1} - d_i)/eps + 1.
double strain(const LatticeState& s, int bond);
void strains(const LatticeState& s, std::span<double> out);

// a_i = [W'(s_i) - W'(s_{i-1})] / (eps * rho), periodic indexing.
void acceleration(const LatticeState& s, const Potential& pot,
                  std::span<double> out);
std::vector<double> acceleration(const LatticeState& s, const Potential& pot);

// Total mechanical energy: sum_i eps * (rho/2 v_i^2 + W(s_i)).
double energy(const LatticeState& s, const Potential& pot);

// sum_i v_i; conserved exactly by the dynamics (forces telescope).
double total_velocity(const LatticeState& s);

// Largest stable-step bound: cfl_fraction * eps * sqrt(rho / max W'') with
// the maximum taken over the potential's certified interval.
double cfl_max_dt(const LatticeState& s, const Potential& pot,
                  double cfl_fraction);

struct IntegratorConfig {
  enum class Scheme { VelocityVerlet };

  double dt = 0.0;
  double t_end = 0.0;
  long sample_stride = 1;
  Scheme scheme = Scheme::VelocityVerlet;
};

// dt chosen so that an integer number of steps lands exactly on t_end (and,
// when samples > 1, on each of the `samples` uniform sample times). Throws
// std::invalid_argument if the CFL bound would be violated.
IntegratorConfig make_cfl_config(const LatticeState& s, const Potential& pot,
                                 double t_end, double cfl_fraction = 0.5,
                                 int samples = 1);

// One velocity-Verlet update. Recomputes the entering force; prefer
// Integrator for long runs, which reuses the force across the kick pair.
void step(LatticeState& s, const Potential& pot, double dt);

using StateSink = std::function<void(const LatticeState&)>;

// Owns the state for the duration of a run; forces are evaluated once per
// step and shared between the trailing and leading half-kicks.
class Integrator {
 public:
  Integrator(LatticeState s, const Potential& pot, IntegratorConfig cfg);

  const LatticeState& state() const { return state_; }
  const IntegratorConfig& config() const { return cfg_; }

  void step();  // advance by cfg.dt; throws integration_error on NaN forces

  // Integrate to t_end, invoking the sink on the initial state and every
  // sample_stride-th step thereafter (final state always included).
  LatticeState run(const StateSink& sink = {});

 private:
  void refresh_forces();

  LatticeState state_;
  const Potential* pot_;
  IntegratorConfig cfg_;
  std::vector<double> accel_;
};

// Convenience wrapper over Integrator::run.
LatticeState run(LatticeState s, const Potential& pot,
                 const IntegratorConfig& cfg, const StateSink& sink = {});

}  // namespace contlim
