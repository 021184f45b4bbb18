#include <cmath>
#include <limits>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "contlim/csv.hpp"
#include "contlim/errors.hpp"
#include "contlim/experiments.hpp"

using namespace contlim;
namespace fs = std::filesystem;

namespace {

std::string scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "contlim_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

ExperimentConfig small_linear_config(const std::string& out) {
  ExperimentConfig cfg;
  cfg.potential = Potential::quadratic(1.0);
  cfg.n_list = {64, 128};
  cfg.data = {0.1, 1};
  cfg.t_end = 0.5;
  cfg.samples = 5;
  cfg.out_dir = out;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("config text parses sections, lists and comments") {
  const ConfigMap cfg = parse_config_text(
      "# comment line\n"
      "[potential]\n"
      "kind = power_plus_quadratic\n"
      "p = 4\n"
      "a = 1.0  # trailing comment\n"
      "b = 0.5\n"
      "[lattice]\n"
      "n_list = 64 128 256\n"
      "rho = 2.0\n");
  CHECK(cfg.get_string("potential.kind", "") == "power_plus_quadratic");
  CHECK(cfg.get_double("potential.b", 0.0) == 0.5);
  CHECK(cfg.get_double("lattice.rho", 0.0) == 2.0);
  CHECK(cfg.get_ints("lattice.n_list", {}) == std::vector<int>{64, 128, 256});
  CHECK(cfg.get_double("missing.key", 7.0) == 7.0);
  CHECK_THROWS_AS(cfg.require_string("missing.key"), config_error);
}

TEST_CASE("malformed config lines are rejected") {
  CHECK_THROWS_AS(parse_config_text("[unclosed\n"), config_error);
  CHECK_THROWS_AS(parse_config_text("just words\n"), config_error);
  CHECK_THROWS_AS(parse_config_text("= value\n"), config_error);
  CHECK_THROWS_AS(parse_config_text("[a]\nx = not_a_number\n").require_double("a.x"),
                  config_error);
}

TEST_CASE("experiment config validates its inputs") {
  CHECK_THROWS_AS(
      experiment_from_config(parse_config_text("[lattice]\nn_list = 128 64\n")),
      config_error);
  CHECK_THROWS_AS(
      experiment_from_config(parse_config_text("[potential]\nkind = cubic\n")),
      config_error);
  CHECK_THROWS_AS(experiment_from_config(parse_config_text(
                      "[lattice]\ncfl_fraction = 0.9\n")),
                  config_error);
  CHECK_THROWS_AS(experiment_from_config(parse_config_text(
                      "[reference]\nkind = fine_lattice\nn_ref = 256\n")),
                  config_error);  // n_ref below 8x the largest N
  // a well-formed config round-trips
  const ExperimentConfig ex = experiment_from_config(parse_config_text(
      "[potential]\nkind = quadratic\nk = 2\ninterval = -1 3\n"
      "[lattice]\nn_list = 32 64\n[experiment]\nt_end = 0.25\n"));
  CHECK(ex.potential.d2(0.0) == 2.0);
  CHECK(ex.potential.certified_interval().lo == -1.0);
  CHECK(ex.n_list == std::vector<int>{32, 64});
  CHECK(ex.t_end == 0.25);
}

TEST_CASE("checkpoint files round-trip the state") {
  const std::string dir = scratch_dir("checkpoint");
  LatticeState s = make_rest_lattice(16, 1.25);
  s.t = 0.75;
  for (int i = 0; i < s.n; ++i) {
    s.disp[static_cast<std::size_t>(i)] = 0.01 * i;
    s.vel[static_cast<std::size_t>(i)] = -0.02 * i;
  }
  const std::string path = dir + "/state.csv";
  write_checkpoint(path, s);
  const LatticeState back = read_checkpoint(path);
  CHECK(back.n == s.n);
  CHECK(back.t == s.t);
  CHECK(back.rho == s.rho);
  for (int i = 0; i < s.n; ++i) {
    CHECK(back.disp[static_cast<std::size_t>(i)] ==
          s.disp[static_cast<std::size_t>(i)]);
    CHECK(back.vel[static_cast<std::size_t>(i)] ==
          s.vel[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("identical recipes produce bitwise identical trajectories") {
  ExperimentConfig cfg = small_linear_config(scratch_dir("bitwise"));
  LatticeState a = make_initial_state(128, cfg);
  LatticeState b = make_initial_state(128, cfg);
  const IntegratorConfig icfg =
      make_cfl_config(a, cfg.potential, 1.0, 0.5, 1);
  a = run(std::move(a), cfg.potential, icfg);
  b = run(std::move(b), cfg.potential, icfg);
  CHECK(a.disp == b.disp);
  CHECK(a.vel == b.vel);
}

TEST_CASE("convergence experiment emits deterministic reports") {
  const std::string out1 = scratch_dir("det1");
  const std::string out2 = scratch_dir("det2");
  ExperimentConfig cfg1 = small_linear_config(out1);
  ExperimentConfig cfg2 = small_linear_config(out2);
  cfg2.threads = 2;  // parallel rows must not change the bytes

  const ConvergenceReport r1 = run_convergence(cfg1);
  const ConvergenceReport r2 = run_convergence(cfg2);
  CHECK(all_pass(r1.checks) == all_pass(r2.checks));
  CHECK(fnv1a_file(out1 + "/convergence.csv") ==
        fnv1a_file(out2 + "/convergence.csv"));
  CHECK(fnv1a_file(out1 + "/manifest.json") ==
        fnv1a_file(out2 + "/manifest.json"));
}

TEST_CASE("convergence on the linear chain halves the error per doubling") {
  ExperimentConfig cfg = small_linear_config(scratch_dir("conv"));
  cfg.n_list = {64, 128, 256};
  cfg.t_end = 1.0;
  const ConvergenceReport rep = run_convergence(cfg);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) CHECK(row.ok);
  CHECK(rep.rows[1].err_v < rep.rows[0].err_v);
  CHECK(rep.rows[2].err_v < rep.rows[1].err_v);
  CHECK(rep.rows[0].err_v / rep.rows[1].err_v > 1.8);
  CHECK(rep.rows[1].err_v / rep.rows[2].err_v > 1.8);
  CHECK(all_pass(rep.checks));
  // weak-strong contraction: the relative entropy at t_end vanishes with eps
  CHECK(rep.rows[1].h_final < rep.rows[0].h_final);
  CHECK(rep.rows[2].h_final < rep.rows[1].h_final);
  for (const auto& row : rep.rows) CHECK(std::isfinite(row.gamma_total));
  // the no-concentration corollary: conserved lattice energy approaches the
  // reference energy as eps shrinks
  double prev_gap = std::numeric_limits<double>::infinity();
  for (int n : cfg.n_list) {
    const double gap = std::abs(energy(make_initial_state(n, cfg), cfg.potential) -
                                rep.reference_energy);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("constant data converge at round-off for every level") {
  ExperimentConfig cfg = small_linear_config(scratch_dir("const"));
  cfg.data.amplitude = 0.0;
  cfg.min_ratio = 0.0;  // ratios are meaningless at round-off
  const ConvergenceReport rep = run_convergence(cfg);
  for (const auto& row : rep.rows) {
    CHECK(row.err_v < 1e-12);
    CHECK(row.err_u < 1e-12);
  }
}

TEST_CASE("zero-horizon convergence reports initialization error only") {
  ExperimentConfig cfg = small_linear_config(scratch_dir("t0"));
  cfg.t_end = 0.0;
  cfg.samples = 1;
  const ConvergenceReport rep = run_convergence(cfg);
  for (const auto& row : rep.rows) {
    CHECK(row.ok);
    // cell-averaging error of the strain is O(eps); no dynamics entered
    CHECK(row.err_u < 2.0 * row.eps);
    CHECK(row.energy_drift == 0.0);
  }
}

TEST_CASE("uniqueness experiment separates vanishing and O(1) perturbations") {
  ExperimentConfig cfg = small_linear_config(scratch_dir("uniq"));
  cfg.n_list = {64, 128, 256};
  cfg.perturb_amplitude = 0.01;
  cfg.uniqueness_scaling = "eps";
  const UniquenessReport eps_scaled = run_uniqueness(cfg);
  CHECK(all_pass(eps_scaled.checks));

  cfg.out_dir = scratch_dir("uniq_const");
  cfg.uniqueness_scaling = "constant";
  const UniquenessReport constant = run_uniqueness(cfg);
  CHECK(all_pass(constant.checks));
  CHECK(constant.rows.back().dist_v > 0.5 * constant.rows.front().dist_v);
}

TEST_CASE("convergence propagates reference horizon violations") {
  ExperimentConfig cfg;
  cfg.potential = Potential::power_plus_quadratic(4.0, 1.0, 1.0, {0.0, 2.0});
  cfg.n_list = {64};
  cfg.data = {0.4, 4};  // steep data, short classical lifespan
  cfg.t_end = 5.0;
  cfg.ref.kind = ReferenceSpec::Kind::FineLattice;
  cfg.ref.n_ref = 512;
  cfg.out_dir = scratch_dir("horizon");
  CHECK_THROWS_AS(run_convergence(cfg), horizon_error);
}

TEST_CASE("trace error vanishes for constant data") {
  ExperimentConfig cfg = small_linear_config(scratch_dir("trace0"));
  cfg.data.amplitude = 0.0;
  cfg.tau_list = {0.1, 0.05};
  const TraceReport rep = run_trace(cfg);
  for (const auto& row : rep.rows) CHECK(row.err < 1e-14);
}

TEST_CASE("trace error grows linearly in tau for smooth data") {
  ExperimentConfig cfg = small_linear_config(scratch_dir("trace"));
  cfg.n_list = {512};
  cfg.tau_list = {0.4, 0.2, 0.1, 0.05};
  const TraceReport rep = run_trace(cfg);
  REQUIRE(rep.rows.size() == 4);
  CHECK(all_pass(rep.checks));
  CHECK(rep.slope == doctest::Approx(1.0).epsilon(0.2));
  // strictly ordered errors across the sweep
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    CHECK(rep.rows[i].err > rep.rows[i - 1].err);
  }
}

TEST_CASE("time-step budget is far below the continuum budget") {
  // the reported error must be dominated by eps, not dt
  ExperimentConfig cfg = small_linear_config(scratch_dir("budget"));
  cfg.n_list = {128};
  cfg.t_end = 1.0;
  const ConvergenceReport base = run_convergence(cfg);

  ExperimentConfig halved = cfg;
  halved.out_dir = scratch_dir("budget_half");
  halved.cfl_fraction = 0.25;
  const ConvergenceReport fine_dt = run_convergence(halved);

  ExperimentConfig doubled = cfg;
  doubled.out_dir = scratch_dir("budget_n");
  doubled.n_list = {256};
  const ConvergenceReport fine_n = run_convergence(doubled);

  const double dt_budget = std::abs(base.rows[0].err_v - fine_dt.rows[0].err_v);
  const double eps_budget = std::abs(base.rows[0].err_v - fine_n.rows[0].err_v);
  CHECK(dt_budget <= 0.1 * eps_budget);
}

TEST_CASE("entropy experiment on the linear chain") {
  ExperimentConfig cfg = small_linear_config(scratch_dir("entropy"));
  cfg.n_list = {512};
  cfg.data.amplitude = 0.05;
  cfg.recipe = DataRecipe::Perturbed;
  cfg.perturb_mode = 3;
  cfg.perturb_amplitude = 1e-2;
  cfg.t_end = 1.0;
  cfg.delta_list = {1e-2, 1e-3};
  const EntropyExperimentReport rep = run_entropy(cfg);
  CHECK(all_pass(rep.checks));
  CHECK(rep.gronwall.pass);
  CHECK(rep.rate == doctest::Approx(0.0).epsilon(1e-9));  // quadratic W
  CHECK(rep.series.h0 > 0.0);
  // H(t)/H(0) <= e^{rate t} with room to spare on the linear chain
  for (std::size_t i = 0; i < rep.series.H.size(); ++i) {
    CHECK(rep.series.H[i] / rep.series.h0 <=
          1.3 * std::exp(rep.rate * rep.series.times[i]));
  }
  // the sweep reproduces delta^2 scaling
  REQUIRE(rep.sweep_h0.size() == 2);
  CHECK(rep.sweep_h0[0] / rep.sweep_h0[1] == doctest::Approx(100.0).epsilon(0.05));
}

TEST_CASE("constant reference bounds the entropy by seed alone") {
  ExperimentConfig cfg = small_linear_config(scratch_dir("entropy_const"));
  cfg.n_list = {256};
  cfg.data.amplitude = 0.0;  // constant reference (1, 0)
  cfg.recipe = DataRecipe::Perturbed;
  cfg.perturb_amplitude = 1e-2;
  cfg.t_end = 1.0;
  cfg.delta_list = {};
  const EntropyExperimentReport rep = run_entropy(cfg);
  CHECK(rep.rate == 0.0);
  CHECK(rep.gronwall.pass);  // H(t) <= H(0) + slack, no growth factor
}

TEST_CASE("simulate writes the full report set") {
  ExperimentConfig cfg = small_linear_config(scratch_dir("simulate"));
  cfg.n_list = {64};
  cfg.t_end = 4.0;        // long enough for the drift oscillation to saturate
  cfg.drift_tol = 1e-4;   // N = 64 plumbing test, not a precision test
  const SimulateReport rep = run_simulate(cfg);
  CHECK(all_pass(rep.checks));
  CHECK(rep.drift < cfg.drift_tol);
  for (const char* name : {"snapshots.csv", "energy.csv", "u.csv", "v.csv",
                           "y.csv", "ytilde.csv", "checkpoint.csv",
                           "manifest.json"}) {
    CHECK(fs::exists(fs::path(cfg.out_dir) / name));
  }
  const LatticeState back =
      read_checkpoint((fs::path(cfg.out_dir) / "checkpoint.csv").string());
  CHECK(back.n == 64);
  CHECK(back.t == doctest::Approx(4.0));
}

TEST_CASE("young experiment on the oscillatory family") {
  ExperimentConfig cfg = small_linear_config(scratch_dir("young_osc"));
  cfg.family = "oscillatory";
  cfg.n_list = {256, 512, 1024};
  const YoungReport rep = run_young(cfg);
  CHECK(all_pass(rep.checks));
  CHECK(rep.sigma_total == doctest::Approx(0.5 * kTwoPi).epsilon(0.05));
}

TEST_CASE("young experiment on the concentrated family") {
  ExperimentConfig cfg = small_linear_config(scratch_dir("young_conc"));
  cfg.family = "concentrated";
  cfg.n_list = {512, 1024, 2048};
  const YoungReport rep = run_young(cfg);
  CHECK(all_pass(rep.checks));
  CHECK(rep.gamma_total == doctest::Approx(1.0).epsilon(0.05));
  CHECK_FALSE(rep.saturated);
}

TEST_CASE("young experiment on a reference-initialized lattice family") {
  ExperimentConfig cfg = small_linear_config(scratch_dir("young_lat"));
  cfg.family = "lattice";
  cfg.n_list = {64, 128, 256};
  cfg.data.amplitude = 0.05;
  cfg.t_end = 0.5;
  const YoungReport rep = run_young(cfg);
  CHECK(all_pass(rep.checks));
  CHECK(rep.gamma_total < 0.01 * rep.energy_total);
}

TEST_SUITE_END();
