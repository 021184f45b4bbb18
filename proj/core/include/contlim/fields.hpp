#pragma once

#include <cstddef>
#include <vector>

#include "contlim/lattice.hpp"

namespace contlim {

enum class FieldKind { PiecewiseConstant, PiecewiseLinear };

// Piecewise-polynomial function on the periodic domain Q = [0, 2*pi), stored
// as cells [edge_i, edge_{i+1}) with value value0_i + slope_i * (X - edge_i).
// Cells are half-open; sampling at a breakpoint returns the right limit.
// Norms and distances are computed in closed form per cell, never by
// quadrature.
class Field {
 public:
  Field() = default;

  static Field constant(double value);
  static Field piecewise_constant(std::vector<double> edges,
                                  std::vector<double> values);
  static Field piecewise_linear(std::vector<double> edges,
                                std::vector<double> value0,
                                std::vector<double> slope);

  FieldKind kind() const { return kind_; }
  std::size_t cells() const { return value0_.size(); }
  double period() const { return kTwoPi; }

  double edge(std::size_t i) const { return edges_[i]; }
  double value0(std::size_t i) const { return value0_[i]; }
  double slope(std::size_t i) const { return slope_[i]; }
  double cell_width(std::size_t i) const { return edges_[i + 1] - edges_[i]; }
  const std::vector<double>& edges() const { return edges_; }

  // Pointwise value; X is wrapped into [0, 2*pi).
  double sample(double x) const;

  // Cell index containing the wrapped coordinate (right-continuous).
  std::size_t cell_of(double x) const;

 private:
  FieldKind kind_ = FieldKind::PiecewiseConstant;
  std::vector<double> edges_;   // size cells()+1, edges_[0]=0, back=2*pi
  std::vector<double> value0_;  // value at the left edge of each cell
  std::vector<double> slope_;   // zero for piecewise-constant fields
};

// Exact L^p norm, p >= 1 (closed-form antiderivative of |a + b s|^p per cell).
double lp_norm(const Field& f, double p);

// f - g on the merged breakpoint set (exact refinement, no resampling).
Field field_difference(const Field& f, const Field& g);

// lp_norm(field_difference(f, g), p); fields of different kinds supported.
double lp_distance(const Field& f, const Field& g, double p);

struct FieldPair {
  Field u;  // strain, piecewise constant
  Field v;  // velocity, piecewise constant
};

struct Interpolants {
  Field y;       // piecewise linear, y(X_i) = x_i
  Field ytilde;  // piecewise constant, x_i on cell i
  FieldPair pair;
};

// The interpolated deformation, its staircase version, and the first-order
// variables (u, v) = (strain, velocity) of a lattice state.
Interpolants interpolate(const LatticeState& s);

// Just the (u, v) pair; cheaper when y is not needed.
FieldPair interpolate_pair(const LatticeState& s);

// Energy-derived a-priori bounds on the interpolants, valid along any
// trajectory of energy E0: the velocity part of sup_t ||v||_L2 and the
// strain part of sup_t ||u||_Lp.
double velocity_norm_bound(double e0, double rho);
double strain_norm_bound(double e0, const Potential& pot);

}  // namespace contlim
