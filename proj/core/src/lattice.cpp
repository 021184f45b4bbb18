#include "contlim/lattice.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "contlim/errors.hpp"

namespace contlim {

LatticeState make_rest_lattice(int n, double rho) {
  if (n < 2) throw std::invalid_argument("lattice needs at least 2 particles");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  LatticeState s;
  s.n = n;
  s.eps = kTwoPi / n;
  s.rho = rho;
  s.disp.assign(static_cast<std::size_t>(n), 0.0);
  s.vel.assign(static_cast<std::size_t>(n), 0.0);
  return s;
}

double strain(const LatticeState& s, int bond) {
  if (bond < 0 || bond >= s.n) {
    throw std::out_of_range("bond index out of range");
  }
  const int next = (bond + 1 == s.n) ? 0 : bond + 1;
  return (s.disp[static_cast<std::size_t>(next)] -
          s.disp[static_cast<std::size_t>(bond)]) /
             s.eps +
         1.0;
}

void strains(const LatticeState& s, std::span<double> out) {
  const std::size_t n = static_cast<std::size_t>(s.n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t next = (i + 1 == n) ? 0 : i + 1;
    out[i] = (s.disp[next] - s.disp[i]) / s.eps + 1.0;
  }
}

void acceleration(const LatticeState& s, const Potential& pot,
                  std::span<double> out) {
  const std::size_t n = static_cast<std::size_t>(s.n);
  // out first holds W'(s_i) per bond, then the telescoped differences.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t next = (i + 1 == n) ? 0 : i + 1;
    out[i] = pot.d1((s.disp[next] - s.disp[i]) / s.eps + 1.0);
  }
  const double inv = 1.0 / (s.eps * s.rho);
  double prev = out[n - 1];
  for (std::size_t i = 0; i < n; ++i) {
    const double cur = out[i];
    out[i] = (cur - prev) * inv;
    prev = cur;
  }
}

std::vector<double> acceleration(const LatticeState& s, const Potential& pot) {
  std::vector<double> a(static_cast<std::size_t>(s.n));
  acceleration(s, pot, a);
  return a;
}

double energy(const LatticeState& s, const Potential& pot) {
  double sum = 0.0;
  for (int i = 0; i < s.n; ++i) {
    const double v = s.vel[static_cast<std::size_t>(i)];
    sum += s.eps * (0.5 * s.rho * v * v + pot.eval(strain(s, i)));
  }
  return sum;
}

double total_velocity(const LatticeState& s) {
  double sum = 0.0;
  for (double v : s.vel) sum += v;
  return sum;
}

double cfl_max_dt(const LatticeState& s, const Potential& pot,
                  double cfl_fraction) {
  if (!(cfl_fraction > 0.0)) {
    throw std::invalid_argument("cfl_fraction must be positive");
  }
  const double w2 = pot.max_d2_on(pot.certified_interval());
  return cfl_fraction * s.eps * std::sqrt(s.rho / w2);
}

IntegratorConfig make_cfl_config(const LatticeState& s, const Potential& pot,
                                 double t_end, double cfl_fraction,
                                 int samples) {
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
  if (samples < 1) samples = 1;
  IntegratorConfig cfg;
  cfg.t_end = t_end;
  const double dt_max = cfl_max_dt(s, pot, cfl_fraction);
  if (t_end == 0.0) {
    cfg.dt = dt_max;
    cfg.sample_stride = 1;
    return cfg;
  }
  // steps = samples * k so that every sample time is an exact step multiple
  long per_sample = static_cast<long>(std::ceil(t_end / (dt_max * samples)));
  if (per_sample < 1) per_sample = 1;
  const long steps = per_sample * samples;
  cfg.dt = t_end / static_cast<double>(steps);
  cfg.sample_stride = per_sample;
  return cfg;
}

void step(LatticeState& s, const Potential& pot, double dt) {
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.t_end = dt;
  Integrator integ(std::move(s), pot, cfg);
  integ.step();
  s = integ.state();
}

Integrator::Integrator(LatticeState s, const Potential& pot,
                       IntegratorConfig cfg)
    : state_(std::move(s)), pot_(&pot), cfg_(cfg) {
  if (!(cfg_.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double limit = cfl_max_dt(state_, pot, 0.5);
  if (cfg_.dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt " << cfg_.dt << " violates the CFL bound " << limit
        << " (eps " << state_.eps << ")";
    throw std::invalid_argument(msg.str());
  }
  accel_.resize(static_cast<std::size_t>(state_.n));
  refresh_forces();
}

void Integrator::refresh_forces() {
  acceleration(state_, *pot_, accel_);
  for (std::size_t i = 0; i < accel_.size(); ++i) {
    if (!std::isfinite(accel_[i])) {
      std::ostringstream msg;
      msg << "non-finite force at particle " << i << ", t = " << state_.t;
      throw integration_error(msg.str());
    }
  }
}

void Integrator::step() {
  const std::size_t n = static_cast<std::size_t>(state_.n);
  const double dt = cfg_.dt;
  const double half = 0.5 * dt;
  for (std::size_t i = 0; i < n; ++i) {
    state_.vel[i] += half * accel_[i];
    state_.disp[i] += dt * state_.vel[i];
  }
  refresh_forces();
  for (std::size_t i = 0; i < n; ++i) {
    state_.vel[i] += half * accel_[i];
  }
  state_.t += dt;
}

LatticeState Integrator::run(const StateSink& sink) {
  const long steps =
      cfg_.t_end > 0.0
          ? static_cast<long>(std::llround(cfg_.t_end / cfg_.dt))
          : 0;
  if (sink) sink(state_);
  for (long k = 1; k <= steps; ++k) {
    step();
    if (sink && (k % cfg_.sample_stride == 0 || k == steps)) sink(state_);
  }
  return state_;
}

LatticeState run(LatticeState s, const Potential& pot,
                 const IntegratorConfig& cfg, const StateSink& sink) {
  Integrator integ(std::move(s), pot, cfg);
  return integ.run(sink);
}

}  // namespace contlim
