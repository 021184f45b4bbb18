#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "contlim/config.hpp"
#include "contlim/entropy.hpp"
#include "contlim/fields.hpp"
#include "contlim/lattice.hpp"
#include "contlim/potential.hpp"
#include "contlim/reference.hpp"
#include "contlim/young_measure.hpp"

namespace contlim {

enum class DataRecipe { SampleReference, Perturbed, Oscillatory, Concentrated };

// Smooth single-cosine data family shared by the reference solutions and the
// lattice initializers: u0 = 1 + amplitude cos(mode X), v0 = 0. The mean
// strain is pinned to 1 by the fixed circumference of the ring.
struct InitialData {
  double amplitude = 0.1;
  int mode = 1;

  double u0(double x) const;
  double v0(double x) const;
  double y0(double x) const;  // antiderivative of u0 with y0(0) = 0
};

struct ReferenceSpec {
  enum class Kind { LinearExact, FineLattice };
  Kind kind = Kind::LinearExact;
  double k = 0.0;  // LinearExact modulus; 0 = take it from the potential
  int n_ref = 8192;
  double lipschitz_cap = 50.0;
  int time_samples = 32;
};

struct ExperimentConfig {
  Potential potential = Potential::quadratic(1.0);
  double rho = 1.0;
  std::vector<int> n_list{64, 128, 256, 512, 1024};
  double cfl_fraction = 0.5;

  double t_end = 1.0;
  int samples = 10;

  InitialData data{};
  DataRecipe recipe = DataRecipe::SampleReference;
  int perturb_mode = 3;
  double perturb_amplitude = 0.01;
  double oscillation_wavelength = 4.0;  // in units of eps (particles)
  double concentration_width = 1.0;     // in units of eps (particles)

  ReferenceSpec ref{};

  // convergence / uniqueness thresholds
  double min_ratio = 1.8;
  std::string uniqueness_scaling = "eps";  // or "constant"

  // entropy experiment
  std::vector<double> delta_list{1e-2, 1e-3};
  double budget_factor = 4.0;

  // trace experiment
  std::vector<double> tau_list{0.2, 0.1, 0.05, 0.025};
  double slope_lo = 0.8;
  double slope_hi = 1.2;

  // young-measure experiment
  std::string family = "oscillatory";  // oscillatory | concentrated | lattice
  int ym_cells = 16;
  int ym_bins = 512;       // scalar families
  int ym_bins_pair = 256;  // per dimension for (u, v) families
  int osc_resolution = 8;  // field cells per lattice spacing
  std::vector<double> truncations{1.0, 2.0, 4.0, 8.0, 16.0};

  double drift_tol = 1e-6;

  std::string out_dir = "out";
  int threads = 1;
  unsigned seed = 0;
  std::uint64_t config_hash = 0;
};

ExperimentConfig experiment_from_config(const ConfigMap& cfg);
ExperimentConfig load_experiment_config(const std::string& path);

LatticeState make_initial_state(int n, const ExperimentConfig& cfg);
std::unique_ptr<ReferenceSolution> build_reference(const ExperimentConfig& cfg);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

bool all_pass(const std::vector<CheckResult>& checks);

struct ConvergenceRow {
  int n = 0;
  double eps = 0.0;
  double err_u = 0.0;        // L^p distance of the strain field
  double err_v = 0.0;        // L^2 distance of the velocity field
  double h_final = 0.0;      // relative entropy at t_end
  double energy_drift = 0.0; // max relative drift over the samples
  double gamma_total = 0.0;  // concentration estimate over the level prefix
  bool ok = true;
  std::string note;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double slope_u = 0.0, slope_v = 0.0;
  double r2_u = 0.0, r2_v = 0.0;
  // min over rows and samples of eps*||u||_p - ||ytilde - y||_p
  double worst_interp_margin = 0.0;
  double energy_total_finest = 0.0;
  double reference_energy = 0.0;  // int eta(ubar, vbar) at t_end
  std::vector<CheckResult> checks;
};
ConvergenceReport run_convergence(const ExperimentConfig& cfg);

struct UniquenessRow {
  int n = 0;
  double eps = 0.0;
  double dist_u = 0.0;
  double dist_v = 0.0;
};
struct UniquenessReport {
  std::vector<UniquenessRow> rows;
  std::vector<CheckResult> checks;
};
UniquenessReport run_uniqueness(const ExperimentConfig& cfg);

struct TraceRow {
  double tau = 0.0;
  double err = 0.0;
};
struct TraceReport {
  std::vector<TraceRow> rows;  // tau increasing
  double slope = 0.0;
  std::vector<CheckResult> checks;
};
TraceReport run_trace(const ExperimentConfig& cfg);

struct YoungReport {
  std::string family;
  double energy_total = 0.0;  // int eta(f) at the finest level
  double sigma_total = 0.0;
  double gamma_total = 0.0;
  double clip_total = 0.0;
  bool saturated = false;
  std::vector<double> gamma_cells;
  std::vector<double> sigma_cells;
  int spike_cell = -1;  // cell carrying the largest gamma mass
  double max_offspike_second_moment = 0.0;
  std::vector<CheckResult> checks;
};
YoungReport run_young(const ExperimentConfig& cfg);

struct EntropyExperimentReport {
  EntropyReport series;
  GronwallResult gronwall;
  double rate = 0.0;
  double disc_budget = 0.0;
  double time_budget = 0.0;
  double h0_unperturbed = 0.0;
  std::vector<double> sweep_deltas;
  std::vector<double> sweep_h0;
  std::vector<CheckResult> checks;
};
EntropyExperimentReport run_entropy(const ExperimentConfig& cfg);

struct SimulateReport {
  LatticeState final_state;
  double e0 = 0.0;
  double drift = 0.0;          // over [0, t_end]
  double drift_doubled = 0.0;  // over [0, 2 t_end]
  std::vector<CheckResult> checks;
};
SimulateReport run_simulate(const ExperimentConfig& cfg);

}  // namespace contlim
