#include "contlim/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace contlim {

namespace {

void require_finite(double u) {
  if (!std::isfinite(u)) {
    throw std::domain_error("potential evaluated at non-finite argument");
  }
}

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument(std::string(name) + " must be positive");
  }
}

// |u|^q for integer q >= 0 without libm; the growth exponents in hot loops
// are small integers.
double abs_powi(double u, int q) {
  double base = std::abs(u);
  double out = 1.0;
  while (q > 0) {
    if (q & 1) out *= base;
    base *= base;
    q >>= 1;
  }
  return out;
}

double abs_pow(double u, double p) {
  const int q = static_cast<int>(p);
  if (static_cast<double>(q) == p && q >= 0 && q <= 16) return abs_powi(u, q);
  return std::pow(std::abs(u), p);
}

std::vector<double> linspace(Interval iv, int samples) {
  if (!(iv.hi > iv.lo)) {
    throw std::invalid_argument("interval must be nondegenerate");
  }
  if (samples < 2) samples = 2;
  std::vector<double> xs(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    xs[static_cast<std::size_t>(i)] =
        iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / (samples - 1);
  }
  xs.front() = iv.lo;
  xs.back() = iv.hi;
  return xs;
}

}  // namespace

Potential Potential::quadratic(double k, Interval certified) {
  require_positive(k, "k");
  Potential p;
  p.kind_ = Kind::Quadratic;
  p.k_ = k;
  p.p_ = 2.0;
  p.c0_ = k;
  p.c1_ = 0.5 * k;
  p.c2_ = 0.0;
  p.certified_ = certified;
  return p;
}

Potential Potential::power_plus_quadratic(double p, double a, double b,
                                          Interval certified) {
  if (!(p >= 2.0) || !std::isfinite(p)) {
    throw std::invalid_argument("growth exponent must satisfy p >= 2");
  }
  require_positive(a, "a");
  require_positive(b, "b");
  Potential pot;
  pot.kind_ = Kind::PowerPlusQuadratic;
  pot.p_ = p;
  pot.a_ = a;
  pot.b_ = b;
  // W'' = p(p-1) a |u|^{p-2} + b attains its minimum at u = 0 for p > 2.
  pot.c0_ = (p > 2.0) ? b : p * (p - 1.0) * a + b;
  pot.c1_ = a;
  pot.c2_ = 0.0;
  pot.certified_ = certified;
  return pot;
}

Potential Potential::custom(Callables f, double p, double c0, double c1,
                            double c2, Interval certified) {
  if (!f.eval || !f.d1 || !f.d2) {
    throw std::invalid_argument("custom potential needs eval, d1 and d2");
  }
  if (!(p >= 2.0)) {
    throw std::invalid_argument("growth exponent must satisfy p >= 2");
  }
  require_positive(c0, "c0");
  require_positive(c1, "c1");
  if (!(c2 >= 0.0)) {
    throw std::invalid_argument("c2 must be nonnegative");
  }
  Potential pot;
  pot.kind_ = Kind::Custom;
  pot.p_ = p;
  pot.c0_ = c0;
  pot.c1_ = c1;
  pot.c2_ = c2;
  pot.certified_ = certified;
  pot.f_ = std::move(f);
  return pot;
}

double Potential::eval(double u) const {
  require_finite(u);
  switch (kind_) {
    case Kind::Quadratic:
      return 0.5 * k_ * u * u;
    case Kind::PowerPlusQuadratic:
      return a_ * abs_pow(u, p_) + 0.5 * b_ * u * u;
    case Kind::Custom:
      return f_.eval(u);
  }
  return 0.0;
}

double Potential::d1(double u) const {
  require_finite(u);
  switch (kind_) {
    case Kind::Quadratic:
      return k_ * u;
    case Kind::PowerPlusQuadratic:
      return p_ * a_ * abs_pow(u, p_ - 1.0) *
                 (u < 0.0 ? -1.0 : (u > 0.0 ? 1.0 : 0.0)) +
             b_ * u;
    case Kind::Custom:
      return f_.d1(u);
  }
  return 0.0;
}

double Potential::d2(double u) const {
  require_finite(u);
  switch (kind_) {
    case Kind::Quadratic:
      return k_;
    case Kind::PowerPlusQuadratic:
      return p_ * (p_ - 1.0) * a_ * abs_pow(u, p_ - 2.0) + b_;
    case Kind::Custom:
      return f_.d2(u);
  }
  return 0.0;
}

double Potential::max_d2_on(Interval iv, int samples) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (double u : linspace(iv, samples)) {
    worst = std::max(worst, d2(u));
  }
  return worst;
}

HypothesisReport Potential::verify_hypotheses() const {
  return verify_hypotheses(certified_, 2049);
}

HypothesisReport Potential::verify_hypotheses(Interval iv, int samples) const {
  HypothesisReport rep;
  const auto us = linspace(iv, samples);

  rep.min_d2 = std::numeric_limits<double>::infinity();
  rep.coercivity_margin = std::numeric_limits<double>::infinity();
  for (double u : us) {
    rep.min_d2 = std::min(rep.min_d2, d2(u));
    const double floor = std::max(0.0, c1_ * abs_pow(u, p_) - c2_);
    rep.coercivity_margin = std::min(rep.coercivity_margin, eval(u) - floor);
  }

  auto superlinearity = [this](double u) {
    const double denom = abs_pow(u, p_);
    return denom > 0.0 ? d1(u) / denom : 0.0;
  };
  rep.superlinearity_lo = superlinearity(iv.lo);
  rep.superlinearity_hi = superlinearity(iv.hi);

  // Quotient bound: wide comparison grid, |m| out to 10 interval radii from
  // the center. Near the diagonal both numerator and denominator vanish
  // quadratically; the limiting ratio |W'''(u)| / W''(u) is sampled via a
  // small finite-difference offset instead.
  const double wide = 10.0 * iv.radius();
  const Interval mrange{iv.center() - wide, iv.center() + wide};
  const auto ms = linspace(mrange, 4 * samples);
  double quot = 0.0;
  for (double u : us) {
    const double w_u = eval(u);
    const double w1_u = d1(u);
    const double w2_u = d2(u);
    for (double m : ms) {
      const double rel = eval(m) - w_u - w1_u * (m - u);
      if (!(rel > 1e-14)) continue;
      const double num = std::abs(d1(m) - w1_u - w2_u * (m - u));
      quot = std::max(quot, num / rel);
    }
    // diagonal limit via m = u +/- h
    const double h = 1e-4 * (1.0 + std::abs(u));
    for (double m : {u - h, u + h}) {
      const double rel = eval(m) - w_u - w1_u * (m - u);
      if (!(rel > 0.0)) continue;
      quot = std::max(quot, std::abs(d1(m) - w1_u - w2_u * (m - u)) / rel);
    }
  }
  rep.quotient_bound = quot;

  const double tiny = 1e-12 * (1.0 + std::abs(c0_));
  if (!(rep.min_d2 > 0.0)) {
    rep.failure = "W'' is not strictly positive on the interval";
  } else if (rep.min_d2 < c0_ - tiny) {
    rep.failure = "sampled W'' falls below the declared convexity bound c0";
  } else if (rep.coercivity_margin < -1e-12) {
    rep.failure = "coercivity bound W >= max(0, c1|u|^p - c2) violated";
  } else if (!std::isfinite(rep.quotient_bound)) {
    rep.failure = "quotient bound did not evaluate to a finite value";
  }
  rep.pass = rep.failure.empty();
  return rep;
}

double relative_potential(const Potential& pot, double m, double ubar) {
  if (m == ubar) return 0.0;
  const double rel = pot.eval(m) - pot.eval(ubar) - pot.d1(ubar) * (m - ubar);
  // convexity makes the exact value nonnegative; clamp roundoff
  return rel < 0.0 ? 0.0 : rel;
}

}  // namespace contlim
