#include "contlim/young_measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace contlim {

namespace {

// Sweep the source cells of a piecewise-constant field against a uniform
// spatial partition, reporting (spatial cell, value, overlap length).
// Index-based so that roundoff at shared breakpoints cannot stall the scan.
template <typename Fn>
void overlap_sweep(const ValueField& f, int cells, Fn&& emit) {
  const double width = kTwoPi / cells;
  for (std::size_t i = 0; i < f.cells(); ++i) {
    const double lo = f.edge(i);
    const double hi = f.edge(i + 1);
    const int first = std::clamp(static_cast<int>(lo / width), 0, cells - 1);
    const int last =
        std::clamp(static_cast<int>((hi - 1e-15) / width), first, cells - 1);
    for (int cell = first; cell <= last; ++cell) {
      const double overlap =
          std::min(hi, (cell + 1) * width) - std::max(lo, cell * width);
      if (overlap > 0.0) emit(cell, f.value(i), overlap);
    }
  }
}

}  // namespace

EnergyDensity quadratic_energy() {
  return [](const StateVector& z) { return z[0] * z[0] + z[1] * z[1]; };
}

EnergyDensity mechanical_energy(const Potential& pot, double rho) {
  return [pot, rho](const StateVector& z) {
    return 0.5 * rho * z[1] * z[1] + pot.eval(z[0]);
  };
}

ValueField::ValueField(const Field& scalar) : dim_(1) {
  if (scalar.kind() != FieldKind::PiecewiseConstant) {
    throw std::invalid_argument("value fields must be piecewise constant");
  }
  edges_ = scalar.edges();
  values_.resize(scalar.cells());
  for (std::size_t i = 0; i < scalar.cells(); ++i) {
    values_[i] = {scalar.value0(i), 0.0};
  }
}

ValueField::ValueField(const FieldPair& pair) : dim_(2) {
  if (pair.u.kind() != FieldKind::PiecewiseConstant ||
      pair.v.kind() != FieldKind::PiecewiseConstant ||
      pair.u.cells() != pair.v.cells()) {
    throw std::invalid_argument(
        "field pair must be piecewise constant on a common grid");
  }
  edges_ = pair.u.edges();
  values_.resize(pair.u.cells());
  for (std::size_t i = 0; i < pair.u.cells(); ++i) {
    values_[i] = {pair.u.value0(i), pair.v.value0(i)};
  }
}

double energy_integral(const ValueField& f, const EnergyDensity& eta) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.cells(); ++i) {
    sum += f.cell_width(i) * eta(f.value(i));
  }
  return sum;
}

double RefinementFamily::energy_bound() const {
  double k = 0.0;
  for (const auto& level : levels) {
    k = std::max(k, energy_integral(level.field, energy));
  }
  return k;
}

StateVector EmpiricalYoungMeasure::bin_center(int b0, int b1) const {
  StateVector c{0.0, 0.0};
  const double d0 = (box_hi[0] - box_lo[0]) / bins_per_dim;
  c[0] = box_lo[0] + (b0 + 0.5) * d0;
  if (dim == 2) {
    const double d1 = (box_hi[1] - box_lo[1]) / bins_per_dim;
    c[1] = box_lo[1] + (b1 + 0.5) * d1;
  }
  return c;
}

double EmpiricalYoungMeasure::weight(int cell, int b0, int b1) const {
  const int per_cell = bins_total();
  const int idx = dim == 1 ? b0 : b0 * bins_per_dim + b1;
  return weights[static_cast<std::size_t>(cell) * per_cell + idx];
}

EmpiricalYoungMeasure build_measure(const RefinementFamily& family, int cells,
                                    int bins) {
  if (family.levels.size() < 2) {
    throw std::invalid_argument(
        "refinement family needs at least two levels");
  }
  if (cells < 1 || bins < 1) {
    throw std::invalid_argument("cells and bins must be positive");
  }
  const ValueField& f = family.finest().field;

  EmpiricalYoungMeasure nu;
  nu.dim = f.dim();
  nu.spatial_cells = cells;
  nu.bins_per_dim = bins;
  nu.finest_eps = family.finest().eps;
  nu.cell_edges.resize(static_cast<std::size_t>(cells) + 1);
  for (int j = 0; j <= cells; ++j) {
    nu.cell_edges[static_cast<std::size_t>(j)] = kTwoPi * j / cells;
  }

  // auto-scaled box with 5% padding per dimension
  for (int d = 0; d < nu.dim; ++d) {
    double lo = f.value(0)[static_cast<std::size_t>(d)];
    double hi = lo;
    for (std::size_t i = 1; i < f.cells(); ++i) {
      lo = std::min(lo, f.value(i)[static_cast<std::size_t>(d)]);
      hi = std::max(hi, f.value(i)[static_cast<std::size_t>(d)]);
    }
    double pad = 0.05 * (hi - lo);
    if (pad == 0.0) pad = 1e-9 * (1.0 + std::abs(lo));
    nu.box_lo[static_cast<std::size_t>(d)] = lo - pad;
    nu.box_hi[static_cast<std::size_t>(d)] = hi + pad;
  }

  const int per_cell = nu.bins_total();
  nu.weights.assign(static_cast<std::size_t>(cells) * per_cell, 0.0);

  auto bin_index = [&nu](const StateVector& z, int d) {
    const double delta =
        (nu.box_hi[static_cast<std::size_t>(d)] - nu.box_lo[static_cast<std::size_t>(d)]) /
        nu.bins_per_dim;
    int b = static_cast<int>((z[static_cast<std::size_t>(d)] -
                              nu.box_lo[static_cast<std::size_t>(d)]) /
                             delta);
    return std::clamp(b, 0, nu.bins_per_dim - 1);
  };

  overlap_sweep(f, cells, [&](int cell, const StateVector& z, double len) {
    const int b0 = bin_index(z, 0);
    const int b1 = nu.dim == 2 ? bin_index(z, 1) : 0;
    const int idx = nu.dim == 1 ? b0 : b0 * nu.bins_per_dim + b1;
    nu.weights[static_cast<std::size_t>(cell) * per_cell + idx] += len;
  });

  for (int j = 0; j < cells; ++j) {
    const double w = nu.cell_width(j);
    for (int b = 0; b < per_cell; ++b) {
      nu.weights[static_cast<std::size_t>(j) * per_cell + b] /= w;
    }
  }
  return nu;
}

Field pair_with(const EmpiricalYoungMeasure& nu,
                const std::function<double(const StateVector&)>& g) {
  std::vector<double> values(static_cast<std::size_t>(nu.spatial_cells), 0.0);
  for (int j = 0; j < nu.spatial_cells; ++j) {
    double sum = 0.0;
    for (int b0 = 0; b0 < nu.bins_per_dim; ++b0) {
      const int b1_max = nu.dim == 2 ? nu.bins_per_dim : 1;
      for (int b1 = 0; b1 < b1_max; ++b1) {
        const double w = nu.weight(j, b0, b1);
        if (w != 0.0) sum += w * g(nu.bin_center(b0, b1));
      }
    }
    values[static_cast<std::size_t>(j)] = sum;
  }
  return Field::piecewise_constant(nu.cell_edges, std::move(values));
}

ConcentrationEstimate concentration_measure(const RefinementFamily& family,
                                            int cells,
                                            std::vector<double> truncations,
                                            int bins) {
  if (truncations.empty() ||
      !std::is_sorted(truncations.begin(), truncations.end())) {
    throw std::invalid_argument("truncations must be increasing and nonempty");
  }
  const EmpiricalYoungMeasure nu = build_measure(family, cells, bins);
  const ValueField& f = family.finest().field;
  const auto& eta = family.energy;

  // exact energy mass per spatial cell
  std::vector<double> exact(static_cast<std::size_t>(cells), 0.0);
  overlap_sweep(f, cells, [&](int cell, const StateVector& z, double len) {
    exact[static_cast<std::size_t>(cell)] += len * eta(z);
  });

  ConcentrationEstimate est;
  est.truncation_levels = truncations;
  est.truncated_totals.reserve(truncations.size());
  std::vector<double> pairing_rmax;
  for (double r : truncations) {
    const Field paired = pair_with(nu, [&](const StateVector& z) {
      return std::min(eta(z), r);
    });
    double total = 0.0;
    std::vector<double> masses(static_cast<std::size_t>(cells));
    for (int j = 0; j < cells; ++j) {
      masses[static_cast<std::size_t>(j)] =
          paired.value0(static_cast<std::size_t>(j)) * nu.cell_width(j);
      total += masses[static_cast<std::size_t>(j)];
    }
    est.truncated_totals.push_back(total);
    if (r == truncations.back()) pairing_rmax = std::move(masses);
  }

  est.cell_masses.resize(static_cast<std::size_t>(cells));
  for (int j = 0; j < cells; ++j) {
    const double raw = exact[static_cast<std::size_t>(j)] -
                       pairing_rmax[static_cast<std::size_t>(j)];
    if (raw < 0.0) {
      est.clip_total += -raw;
      est.cell_masses[static_cast<std::size_t>(j)] = 0.0;
    } else {
      est.cell_masses[static_cast<std::size_t>(j)] = raw;
    }
    est.total_mass += est.cell_masses[static_cast<std::size_t>(j)];
  }

  if (est.truncated_totals.size() >= 2) {
    const double last = est.truncated_totals.back();
    const double prev = est.truncated_totals[est.truncated_totals.size() - 2];
    est.saturated = (last - prev) <= 1e-3 * std::max(last, 1e-300);
  } else {
    est.saturated = true;
  }
  return est;
}

std::vector<double> defect_measure(const RefinementFamily& family, int cells,
                                   int bins) {
  const EmpiricalYoungMeasure nu = build_measure(family, cells, bins);
  const ValueField& f = family.finest().field;
  const auto& eta = family.energy;

  std::vector<double> exact(static_cast<std::size_t>(cells), 0.0);
  overlap_sweep(f, cells, [&](int cell, const StateVector& z, double len) {
    exact[static_cast<std::size_t>(cell)] += len * eta(z);
  });

  const Field mean0 = pair_with(nu, [](const StateVector& z) { return z[0]; });
  const Field mean1 = pair_with(nu, [](const StateVector& z) { return z[1]; });

  std::vector<double> sigma(static_cast<std::size_t>(cells));
  for (int j = 0; j < cells; ++j) {
    const StateVector mean{mean0.value0(static_cast<std::size_t>(j)),
                           mean1.value0(static_cast<std::size_t>(j))};
    sigma[static_cast<std::size_t>(j)] =
        exact[static_cast<std::size_t>(j)] - nu.cell_width(j) * eta(mean);
  }
  return sigma;
}

StabilityReport level_stability(const RefinementFamily& family, int cells,
                                double r_max, int bins) {
  StabilityReport rep;
  if (family.levels.size() < 3) return rep;
  for (std::size_t last = 1; last < family.levels.size(); ++last) {
    RefinementFamily prefix;
    prefix.energy = family.energy;
    prefix.levels.assign(family.levels.begin(),
                         family.levels.begin() + static_cast<long>(last) + 1);
    const EmpiricalYoungMeasure nu = build_measure(prefix, cells, bins);
    const Field paired = pair_with(nu, [&](const StateVector& z) {
      return std::min(family.energy(z), r_max);
    });
    double total = 0.0;
    for (int j = 0; j < cells; ++j) {
      total += paired.value0(static_cast<std::size_t>(j)) * nu.cell_width(j);
    }
    rep.level_eps.push_back(family.levels[last].eps);
    rep.pairing_totals.push_back(total);
  }
  for (std::size_t i = 2; i < rep.pairing_totals.size(); ++i) {
    const double d_prev =
        std::abs(rep.pairing_totals[i - 1] - rep.pairing_totals[i - 2]);
    const double d_cur =
        std::abs(rep.pairing_totals[i] - rep.pairing_totals[i - 1]);
    if (d_cur > std::max(2.0 * d_prev, 1e-12)) rep.cauchy = false;
  }
  return rep;
}

}  // namespace contlim
