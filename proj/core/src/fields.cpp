#include "contlim/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace contlim {

namespace {

constexpr double kEdgeTol = 1e-12;

void validate_edges(const std::vector<double>& edges, std::size_t cells) {
  if (edges.size() != cells + 1 || cells == 0) {
    throw std::invalid_argument("field needs cells+1 edges");
  }
  if (std::abs(edges.front()) > kEdgeTol ||
      std::abs(edges.back() - kTwoPi) > kEdgeTol) {
    throw std::invalid_argument("cells must partition [0, 2*pi)");
  }
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i + 1] > edges[i])) {
      throw std::invalid_argument("edges must be strictly increasing");
    }
  }
}

void validate_finite(const std::vector<double>& xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("field coefficients must be finite");
    }
  }
}

double wrap(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  return y;
}

// sgn(g) |g|^{p+1} / (b (p+1)) is an antiderivative of |a + b s|^p in s.
double signed_power(double g, double q) {
  return std::copysign(std::pow(std::abs(g), q), g);
}

double cell_abs_power_integral(double a, double b, double w, double p) {
  if (b == 0.0 || std::abs(b) * w <= 1e-9 * std::abs(a)) {
    // near-constant cell: midpoint value avoids cancellation
    const double mid = a + 0.5 * b * w;
    return std::pow(std::abs(mid), p) * w;
  }
  const double g1 = a + b * w;
  return (signed_power(g1, p + 1.0) - signed_power(a, p + 1.0)) /
         (b * (p + 1.0));
}

}  // namespace

Field Field::constant(double value) {
  return piecewise_constant({0.0, kTwoPi}, {value});
}

Field Field::piecewise_constant(std::vector<double> edges,
                                std::vector<double> values) {
  validate_edges(edges, values.size());
  validate_finite(values);
  edges.front() = 0.0;
  edges.back() = kTwoPi;
  Field f;
  f.kind_ = FieldKind::PiecewiseConstant;
  f.slope_.assign(values.size(), 0.0);
  f.edges_ = std::move(edges);
  f.value0_ = std::move(values);
  return f;
}

Field Field::piecewise_linear(std::vector<double> edges,
                              std::vector<double> value0,
                              std::vector<double> slope) {
  validate_edges(edges, value0.size());
  if (slope.size() != value0.size()) {
    throw std::invalid_argument("value0 and slope must have equal length");
  }
  validate_finite(value0);
  validate_finite(slope);
  edges.front() = 0.0;
  edges.back() = kTwoPi;
  Field f;
  f.kind_ = FieldKind::PiecewiseLinear;
  f.edges_ = std::move(edges);
  f.value0_ = std::move(value0);
  f.slope_ = std::move(slope);
  return f;
}

std::size_t Field::cell_of(double x) const {
  const double y = wrap(x);
  auto it = std::upper_bound(edges_.begin(), edges_.end(), y);
  std::size_t idx = static_cast<std::size_t>(it - edges_.begin());
  if (idx == 0) return 0;
  idx -= 1;
  return std::min(idx, cells() - 1);
}

double Field::sample(double x) const {
  const double y = wrap(x);
  const std::size_t i = cell_of(y);
  return value0_[i] + slope_[i] * (y - edges_[i]);
}

double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm needs p >= 1");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.cells(); ++i) {
    sum += cell_abs_power_integral(f.value0(i), f.slope(i), f.cell_width(i), p);
  }
  return std::pow(sum, 1.0 / p);
}

Field field_difference(const Field& f, const Field& g) {
  if (f.period() != g.period()) {
    throw std::invalid_argument("fields have incompatible periods");
  }
  // merged breakpoint set
  std::vector<double> merged;
  merged.reserve(f.cells() + g.cells() + 1);
  std::merge(f.edges().begin(), f.edges().end(), g.edges().begin(),
             g.edges().end(), std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end(),
                           [](double a, double b) {
                             return std::abs(a - b) <= kEdgeTol;
                           }),
               merged.end());

  const std::size_t cells = merged.size() - 1;
  std::vector<double> value0(cells), slope(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double left = merged[i];
    const double mid = 0.5 * (merged[i] + merged[i + 1]);
    const std::size_t cf = f.cell_of(mid);
    const std::size_t cg = g.cell_of(mid);
    const double f0 = f.value0(cf) + f.slope(cf) * (left - f.edge(cf));
    const double g0 = g.value0(cg) + g.slope(cg) * (left - g.edge(cg));
    value0[i] = f0 - g0;
    slope[i] = f.slope(cf) - g.slope(cg);
  }
  if (f.kind() == FieldKind::PiecewiseConstant &&
      g.kind() == FieldKind::PiecewiseConstant) {
    return Field::piecewise_constant(std::move(merged), std::move(value0));
  }
  return Field::piecewise_linear(std::move(merged), std::move(value0),
                                 std::move(slope));
}

double lp_distance(const Field& f, const Field& g, double p) {
  return lp_norm(field_difference(f, g), p);
}

Interpolants interpolate(const LatticeState& s) {
  const std::size_t n = static_cast<std::size_t>(s.n);
  std::vector<double> edges(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    edges[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(s.n);
  }
  std::vector<double> pos(n), str(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = s.disp[i] + edges[i];
  strains(s, str);

  Interpolants out;
  out.y = Field::piecewise_linear(edges, pos, str);
  out.ytilde = Field::piecewise_constant(edges, pos);
  out.pair.u = Field::piecewise_constant(edges, std::move(str));
  out.pair.v = Field::piecewise_constant(std::move(edges), s.vel);
  return out;
}

FieldPair interpolate_pair(const LatticeState& s) {
  const std::size_t n = static_cast<std::size_t>(s.n);
  std::vector<double> edges(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    edges[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(s.n);
  }
  std::vector<double> str(n);
  strains(s, str);
  FieldPair pair;
  pair.u = Field::piecewise_constant(edges, std::move(str));
  pair.v = Field::piecewise_constant(std::move(edges), s.vel);
  return pair;
}

double velocity_norm_bound(double e0, double rho) {
  return std::sqrt(2.0 * e0 / rho);
}

double strain_norm_bound(double e0, const Potential& pot) {
  const double p = pot.growth_exponent();
  return std::pow((e0 + kTwoPi * pot.coercivity_shift()) /
                      pot.coercivity_scale(),
                  1.0 / p);
}

}  // namespace contlim
