#pragma once

#include <functional>
#include <string>

namespace contlim {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double radius() const { return 0.5 * (hi - lo); }
  double center() const { return 0.5 * (hi + lo); }
};

// Certificate produced by Potential::verify_hypotheses. All quantities are
// sampled over the requested interval (endpoints included); `quotient_bound`
// additionally scans a wide grid of comparison states, up to ten interval
// radii away, since it controls the flux error term in the stability
// estimate.
struct HypothesisReport {
  bool pass = false;
  double min_d2 = 0.0;             // smallest sampled W''
  double coercivity_margin = 0.0;  // min of W(u) - max(0, c1|u|^p - c2)
  double superlinearity_lo = 0.0;  // W'(u)/|u|^p at the left endpoint
  double superlinearity_hi = 0.0;  // W'(u)/|u|^p at the right endpoint
  // sup over (m, u) of |W'(m) - W'(u) - W''(u)(m-u)| / relative_potential(m, u)
  double quotient_bound = 0.0;
  std::string failure;  // empty on pass
};

// Stored-energy law of a single spring bond. Strictly convex with
// W'' >= c0 > 0 and coercive: W(u) >= max(0, c1|u|^p - c2).
//
// Built-in kinds carry closed-form derivatives and computed coercivity
// constants; custom kinds must supply all three callables plus their own
// certificates, which verify_hypotheses cross-checks by sampling.
class Potential {
 public:
  enum class Kind { Quadratic, PowerPlusQuadratic, Custom };

  struct Callables {
    std::function<double(double)> eval;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
  };

  // W(u) = k u^2 / 2
  static Potential quadratic(double k, Interval certified = {-2.0, 4.0});
  // W(u) = a |u|^p + b u^2 / 2, p >= 2
  static Potential power_plus_quadratic(double p, double a, double b,
                                        Interval certified = {-2.0, 4.0});
  static Potential custom(Callables f, double p, double c0, double c1,
                          double c2, Interval certified);

  Kind kind() const { return kind_; }

  double eval(double u) const;  // W(u); throws std::domain_error on non-finite u
  double d1(double u) const;    // W'(u)
  double d2(double u) const;    // W''(u)

  double growth_exponent() const { return p_; }        // p
  double convexity_lower_bound() const { return c0_; } // c0
  double coercivity_scale() const { return c1_; }      // c1
  double coercivity_shift() const { return c2_; }      // c2
  Interval certified_interval() const { return certified_; }

  // Largest sampled W'' over an interval (endpoints included). Drives the
  // CFL limit of the lattice integrator.
  double max_d2_on(Interval iv, int samples = 4097) const;

  HypothesisReport verify_hypotheses(Interval iv, int samples) const;
  HypothesisReport verify_hypotheses() const;  // certified interval, 2049 samples

 private:
  Potential() = default;

  Kind kind_ = Kind::Quadratic;
  double k_ = 1.0;             // Quadratic
  double p_ = 2.0;             // growth exponent
  double a_ = 0.0, b_ = 0.0;   // PowerPlusQuadratic
  double c0_ = 0.0, c1_ = 0.0, c2_ = 0.0;
  Interval certified_{};
  Callables f_{};
};

// W(m) - W(u) - W'(u)(m - u); nonnegative for convex W.
double relative_potential(const Potential& pot, double m, double ubar);

}  // namespace contlim
