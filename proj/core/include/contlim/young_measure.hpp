#pragma once

#include <array>
#include <functional>
#include <vector>

#include "contlim/fields.hpp"
#include "contlim/potential.hpp"

namespace contlim {

// Value of a refinement-family function at a point: one or two components
// (scalar families, or (u, v) pairs from lattice runs).
using StateVector = std::array<double, 2>;
using EnergyDensity = std::function<double(const StateVector&)>;

EnergyDensity quadratic_energy();  // |value|^2 over the active components
EnergyDensity mechanical_energy(const Potential& pot, double rho);

// Piecewise-constant vector-valued function on Q; the common carrier for
// scalar fields and field pairs.
class ValueField {
 public:
  explicit ValueField(const Field& scalar);
  explicit ValueField(const FieldPair& pair);

  int dim() const { return dim_; }
  std::size_t cells() const { return values_.size(); }
  double edge(std::size_t i) const { return edges_[i]; }
  double cell_width(std::size_t i) const { return edges_[i + 1] - edges_[i]; }
  const StateVector& value(std::size_t i) const { return values_[i]; }

 private:
  int dim_ = 1;
  std::vector<double> edges_;
  std::vector<StateVector> values_;
};

double energy_integral(const ValueField& f, const EnergyDensity& eta);

struct RefinementLevel {
  double eps = 0.0;
  ValueField field;
};

// Functions f^eps at decreasing eps, with uniformly bounded energy
// sup_eps int eta(f^eps) <= K. The measure constructions histogram the
// finest level; coarser levels feed the level-to-level stability report.
struct RefinementFamily {
  std::vector<RefinementLevel> levels;  // ordered coarse to fine
  EnergyDensity energy;

  double energy_bound() const;  // K, computed
  const RefinementLevel& finest() const { return levels.back(); }
};

// Per-spatial-cell histogram over an auto-scaled state-space box (5% padding;
// outliers clamp to the boundary bins). Each cell's weights sum to 1; the
// weight of a value is the length fraction of the cell where it is attained.
struct EmpiricalYoungMeasure {
  int dim = 1;
  int spatial_cells = 0;
  int bins_per_dim = 0;
  std::vector<double> cell_edges;  // spatial, size spatial_cells + 1
  StateVector box_lo{0.0, 0.0};
  StateVector box_hi{0.0, 0.0};
  std::vector<double> weights;  // [cell][b0][b1], flattened
  double finest_eps = 0.0;

  StateVector bin_center(int b0, int b1) const;
  double weight(int cell, int b0, int b1) const;
  double cell_width(int cell) const {
    return cell_edges[cell + 1] - cell_edges[cell];
  }
  int bins_total() const { return dim == 1 ? bins_per_dim : bins_per_dim * bins_per_dim; }
};

// Histogram of the finest level over `cells` uniform spatial cells with
// `bins` bins per state dimension. Throws std::invalid_argument unless the
// family has at least two levels.
EmpiricalYoungMeasure build_measure(const RefinementFamily& family, int cells,
                                    int bins);

// <nu_y, g> as a piecewise-constant field over the spatial cells.
Field pair_with(const EmpiricalYoungMeasure& nu,
                const std::function<double(const StateVector&)>& g);

struct ConcentrationEstimate {
  std::vector<double> cell_masses;        // gamma per spatial cell, clipped at 0
  std::vector<double> truncation_levels;  // the R sweep
  std::vector<double> truncated_totals;   // sum_cells <nu, min(eta, R)> width
  double total_mass = 0.0;
  double clip_total = 0.0;  // magnitude removed by clipping negatives
  bool saturated = false;   // <nu, eta_R> stabilized over the sweep
};

// gamma estimate: per cell, int eta(f^finest) - <nu, eta_{R_max}> width.
// A non-saturating R sweep is the signature of concentration and is
// reported, not thrown.
ConcentrationEstimate concentration_measure(const RefinementFamily& family,
                                            int cells,
                                            std::vector<double> truncations,
                                            int bins);

// sigma estimate: per cell, int eta(f^finest) - eta(<nu, lambda>) width,
// with the histogram mean standing in for the weak limit.
std::vector<double> defect_measure(const RefinementFamily& family, int cells,
                                   int bins);

// Consecutive-level estimator differences for <nu, eta_Rmax>; flags
// non-Cauchy behaviour (differences growing from one refinement to the
// next) instead of asserting a limit.
struct StabilityReport {
  std::vector<double> level_eps;
  std::vector<double> pairing_totals;  // <nu, eta_R_max> per level prefix
  bool cauchy = true;
};
StabilityReport level_stability(const RefinementFamily& family, int cells,
                                double r_max, int bins);

}  // namespace contlim
