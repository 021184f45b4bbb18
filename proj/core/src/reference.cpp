#include "contlim/reference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "contlim/errors.hpp"
#include "contlim/quadrature.hpp"

namespace contlim {

double LipschitzReport::max() const {
  return std::max(std::max(dx_ubar, dx_vbar), std::max(dt_ubar, dt_vbar));
}

void ReferenceSolution::check_horizon(double t) const {
  if (t < 0.0 || t > t_max_classical() * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "reference evaluated at t = " << t
        << " outside the classical horizon [0, " << t_max_classical() << "]";
    throw horizon_error(msg.str());
  }
}

double lipschitz_norm(const ReferenceSolution& ref) {
  return ref.lipschitz().max();
}

LinearExactSolution::LinearExactSolution(double k, double rho, double mean_u,
                                         double mean_v,
                                         std::vector<WaveMode> modes)
    : k_(k), rho_(rho), mean_u_(mean_u), mean_v_(mean_v),
      modes_(std::move(modes)) {
  if (!(k > 0.0) || !(rho > 0.0)) {
    throw std::invalid_argument("modulus and density must be positive");
  }
  for (const auto& m : modes_) {
    if (m.m < 1) throw std::invalid_argument("mode numbers must be >= 1");
  }
}

LinearExactSolution LinearExactSolution::single_cosine(double k, double rho,
                                                       double mean_u,
                                                       double amplitude,
                                                       int mode) {
  WaveMode m;
  m.m = mode;
  m.u_cos = amplitude;
  return LinearExactSolution(k, rho, mean_u, 0.0, {m});
}

// Mode coefficients evolve by
//   a' = m d,  b' = -m c,  c' = (k/rho) m b,  d' = -(k/rho) m a
// for u = a cos(mX) + b sin(mX), v = c cos(mX) + d sin(mX); each solves the
// oscillator with omega = m sqrt(k/rho).
UV LinearExactSolution::evaluate(double t, double x) const {
  check_horizon(t);
  const double cs = std::sqrt(k_ / rho_);
  UV out{mean_u_, mean_v_};
  for (const auto& md : modes_) {
    const double omega = md.m * cs;
    const double cw = std::cos(omega * t), sw = std::sin(omega * t);
    const double a = md.u_cos * cw + (md.v_sin * md.m / omega) * sw;
    const double b = md.u_sin * cw - (md.v_cos * md.m / omega) * sw;
    const double c = md.v_cos * cw + (k_ / rho_) * (md.u_sin * md.m / omega) * sw;
    const double d = md.v_sin * cw - (k_ / rho_) * (md.u_cos * md.m / omega) * sw;
    const double cx = std::cos(md.m * x), sx = std::sin(md.m * x);
    out.u += a * cx + b * sx;
    out.v += c * cx + d * sx;
  }
  return out;
}

UV LinearExactSolution::x_derivative(double t, double x) const {
  check_horizon(t);
  const double cs = std::sqrt(k_ / rho_);
  UV out{0.0, 0.0};
  for (const auto& md : modes_) {
    const double omega = md.m * cs;
    const double cw = std::cos(omega * t), sw = std::sin(omega * t);
    const double a = md.u_cos * cw + (md.v_sin * md.m / omega) * sw;
    const double b = md.u_sin * cw - (md.v_cos * md.m / omega) * sw;
    const double c = md.v_cos * cw + (k_ / rho_) * (md.u_sin * md.m / omega) * sw;
    const double d = md.v_sin * cw - (k_ / rho_) * (md.u_cos * md.m / omega) * sw;
    const double cx = std::cos(md.m * x), sx = std::sin(md.m * x);
    out.u += md.m * (-a * sx + b * cx);
    out.v += md.m * (-c * sx + d * cx);
  }
  return out;
}

UV LinearExactSolution::t_derivative(double t, double x) const {
  check_horizon(t);
  const double cs = std::sqrt(k_ / rho_);
  UV out{0.0, 0.0};
  for (const auto& md : modes_) {
    const double omega = md.m * cs;
    const double cw = std::cos(omega * t), sw = std::sin(omega * t);
    const double adot = -omega * md.u_cos * sw + md.v_sin * md.m * cw;
    const double bdot = -omega * md.u_sin * sw - md.v_cos * md.m * cw;
    const double cdot = -omega * md.v_cos * sw + (k_ / rho_) * md.u_sin * md.m * cw;
    const double ddot = -omega * md.v_sin * sw - (k_ / rho_) * md.u_cos * md.m * cw;
    const double cx = std::cos(md.m * x), sx = std::sin(md.m * x);
    out.u += adot * cx + bdot * sx;
    out.v += cdot * cx + ddot * sx;
  }
  return out;
}

LipschitzReport LinearExactSolution::lipschitz() const {
  // Derivatives are trigonometric in t with the mode frequencies; a grid
  // over the slowest period bounds the sup tightly (exactly for one mode).
  double omega_min = std::numeric_limits<double>::infinity();
  const double cs = std::sqrt(k_ / rho_);
  for (const auto& md : modes_) omega_min = std::min(omega_min, md.m * cs);
  const double t_span = modes_.empty() ? 1.0 : kTwoPi / omega_min;

  LipschitzReport rep;
  const int nt = 200, nx = 200;
  for (int it = 0; it <= nt; ++it) {
    const double t = t_span * it / nt;
    for (int ix = 0; ix <= nx; ++ix) {
      const double x = kTwoPi * ix / nx;
      const UV dx = x_derivative(t, x);
      const UV dt = t_derivative(t, x);
      rep.dx_ubar = std::max(rep.dx_ubar, std::abs(dx.u));
      rep.dx_vbar = std::max(rep.dx_vbar, std::abs(dx.v));
      rep.dt_ubar = std::max(rep.dt_ubar, std::abs(dt.u));
      rep.dt_vbar = std::max(rep.dt_vbar, std::abs(dt.v));
    }
  }
  return rep;
}

double LinearExactSolution::initial_position(double x) const {
  double y = mean_u_ * x;
  for (const auto& md : modes_) {
    y += (md.u_cos / md.m) * std::sin(md.m * x) -
         (md.u_sin / md.m) * (std::cos(md.m * x) - 1.0);
  }
  return y;
}

double classical_horizon_estimate(const FieldPair& data0, const Potential& pot,
                                  double rho) {
  const std::size_t n = data0.u.cells();
  double steepening = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t next = (i + 1 == n) ? 0 : i + 1;
    const double w = data0.u.cell_width(i);
    const double u = data0.u.value0(i);
    const double du = (data0.u.value0(next) - u) / w;
    const double dv = (data0.v.value0(next) - data0.v.value0(i)) / w;
    const double c = std::sqrt(pot.d2(u) / rho);
    const double h = 1e-5 * (1.0 + std::abs(u));
    const double d3 = (pot.d2(u + h) - pot.d2(u - h)) / (2.0 * h);
    const double cprime = d3 / (2.0 * std::sqrt(pot.d2(u) * rho));
    steepening =
        std::max(steepening, std::abs(cprime) * (std::abs(du) + std::abs(dv) / c));
  }
  if (steepening == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 / steepening;
}

FineLatticeOracle FineLatticeOracle::from_lattice_run(LatticeState initial,
                                                      const Potential& pot,
                                                      double t_end,
                                                      const Options& opt) {
  FineLatticeOracle oracle;
  oracle.n_ref_ = initial.n;

  const FieldPair data0 = interpolate_pair(initial);
  const double t_heur = classical_horizon_estimate(data0, pot, initial.rho);
  const double t_max = std::min(opt.t_max_hint, t_heur);
  if (t_end > t_max) {
    std::ostringstream msg;
    msg << "requested oracle horizon " << t_end
        << " exceeds the classical-lifespan estimate " << t_max;
    throw horizon_error(msg.str());
  }

  const int samples = std::max(2, opt.time_samples);
  IntegratorConfig cfg =
      make_cfl_config(initial, pot, t_end, opt.cfl_fraction, samples);
  oracle.times_.reserve(static_cast<std::size_t>(samples) + 1);
  oracle.snaps_.reserve(static_cast<std::size_t>(samples) + 1);
  oracle.final_state_ =
      run(std::move(initial), pot, cfg, [&oracle](const LatticeState& s) {
        oracle.times_.push_back(s.t);
        oracle.snaps_.push_back(interpolate_pair(s));
      });
  oracle.t_max_ = oracle.times_.back();

  // discrete Lipschitz norm over the stored trajectory
  LipschitzReport rep;
  const double eps = oracle.eps_ref();
  const std::size_t n = static_cast<std::size_t>(oracle.n_ref_);
  for (std::size_t j = 0; j < oracle.snaps_.size(); ++j) {
    const FieldPair& fp = oracle.snaps_[j];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t next = (i + 1 == n) ? 0 : i + 1;
      rep.dx_ubar = std::max(
          rep.dx_ubar, std::abs(fp.u.value0(next) - fp.u.value0(i)) / eps);
      rep.dx_vbar = std::max(
          rep.dx_vbar, std::abs(fp.v.value0(next) - fp.v.value0(i)) / eps);
    }
    if (j + 1 < oracle.snaps_.size()) {
      const FieldPair& fn = oracle.snaps_[j + 1];
      const double dt = oracle.times_[j + 1] - oracle.times_[j];
      for (std::size_t i = 0; i < n; ++i) {
        rep.dt_ubar = std::max(
            rep.dt_ubar, std::abs(fn.u.value0(i) - fp.u.value0(i)) / dt);
        rep.dt_vbar = std::max(
            rep.dt_vbar, std::abs(fn.v.value0(i) - fp.v.value0(i)) / dt);
      }
    }
  }
  oracle.lipschitz_ = rep;
  if (rep.max() > opt.lipschitz_cap) {
    std::ostringstream msg;
    msg << "oracle Lipschitz norm " << rep.max() << " exceeds the cap "
        << opt.lipschitz_cap << "; classical regime not certified";
    throw horizon_error(msg.str());
  }
  return oracle;
}

UV FineLatticeOracle::evaluate(double t, double x) const {
  check_horizon(t);
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  if (hi >= times_.size()) hi = times_.size() - 1;
  if (hi == 0) {
    return {snaps_[0].u.sample(x), snaps_[0].v.sample(x)};
  }
  const std::size_t lo = hi - 1;
  const double span = times_[hi] - times_[lo];
  const double w = span > 0.0 ? (t - times_[lo]) / span : 0.0;
  const FieldPair& a = snaps_[lo];
  const FieldPair& b = snaps_[hi];
  UV out;
  out.u = (1.0 - w) * a.u.sample(x) + w * b.u.sample(x);
  out.v = (1.0 - w) * a.v.sample(x) + w * b.v.sample(x);
  return out;
}

SpaceTimeTestFunction trig_test_function(int mode, bool sine,
                                         double t_support) {
  if (!(t_support > 0.0)) {
    throw std::invalid_argument("t_support must be positive");
  }
  SpaceTimeTestFunction phi;
  phi.t_support = t_support;
  phi.theta = [t_support](double t) {
    if (t >= t_support) return 0.0;
    const double r = 1.0 - t / t_support;
    return r * r;
  };
  phi.theta_dot = [t_support](double t) {
    if (t >= t_support) return 0.0;
    return -2.0 * (1.0 - t / t_support) / t_support;
  };
  if (mode == 0) {
    phi.psi = [](double) { return 1.0; };
    phi.psi_prime = [](double) { return 0.0; };
  } else if (sine) {
    phi.psi = [mode](double x) { return std::sin(mode * x); };
    phi.psi_prime = [mode](double x) { return mode * std::cos(mode * x); };
  } else {
    phi.psi = [mode](double x) { return std::cos(mode * x); };
    phi.psi_prime = [mode](double x) { return -mode * std::sin(mode * x); };
  }
  return phi;
}

double weak_form_residual(const ReferenceSolution& ref, const Potential& pot,
                          double rho, const SpaceTimeTestFunction& phi,
                          int x_panels, int t_panels) {
  const double t_hi = std::min(phi.t_support, ref.t_max_classical());
  auto space_integral = [&](double t) {
    return gauss_composite<GaussRule8>(
        [&](double x) {
          const UV w = ref.evaluate(t, x);
          return rho * phi.theta_dot(t) * phi.psi(x) * w.v -
                 phi.theta(t) * phi.psi_prime(x) * pot.d1(w.u);
        },
        0.0, kTwoPi, x_panels);
  };
  double res = gauss_composite<GaussRule8>(space_integral, 0.0, t_hi, t_panels);
  res += gauss_composite<GaussRule8>(
      [&](double x) {
        return phi.theta(0.0) * phi.psi(x) * rho * ref.evaluate(0.0, x).v;
      },
      0.0, kTwoPi, x_panels);
  return res;
}

}  // namespace contlim
