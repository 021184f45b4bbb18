// contlim: spring-mass chain continuum-limit simulator and diagnostics.
//
// Subcommands run one experiment each from a key-value config file and write
// CSV reports plus a machine-readable manifest into the output directory.
// Exit codes: 0 all checks passed, 1 a check failed, 2 configuration or
// horizon error.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "contlim/errors.hpp"
#include "contlim/experiments.hpp"

namespace {

using namespace contlim;

void print_checks(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) {
    std::printf("[%s] %s: %s\n", c.pass ? "pass" : "FAIL", c.name.c_str(),
                c.detail.c_str());
  }
}

int finish(const std::vector<CheckResult>& checks, const std::string& out_dir) {
  print_checks(checks);
  std::printf("reports written to %s\n", out_dir.c_str());
  return all_pass(checks) ? 0 : 1;
}

int dispatch(const std::string& sub, ExperimentConfig cfg) {
  if (sub == "simulate") {
    return finish(run_simulate(cfg).checks, cfg.out_dir);
  }
  if (sub == "converge") {
    const ConvergenceReport rep = run_convergence(cfg);
    for (const auto& row : rep.rows) {
      if (!row.ok) std::printf("row N=%d aborted: %s\n", row.n, row.note.c_str());
    }
    std::printf("fitted slopes: u %.3f (R2 %.4f), v %.3f (R2 %.4f)\n",
                rep.slope_u, rep.r2_u, rep.slope_v, rep.r2_v);
    return finish(rep.checks, cfg.out_dir);
  }
  if (sub == "uniqueness") {
    return finish(run_uniqueness(cfg).checks, cfg.out_dir);
  }
  if (sub == "trace") {
    const TraceReport rep = run_trace(cfg);
    std::printf("trace slope: %.3f\n", rep.slope);
    return finish(rep.checks, cfg.out_dir);
  }
  if (sub == "young") {
    const YoungReport rep = run_young(cfg);
    std::printf("sigma_total %.6g, gamma_total %.6g%s\n", rep.sigma_total,
                rep.gamma_total, rep.saturated ? "" : " (R sweep not saturated)");
    return finish(rep.checks, cfg.out_dir);
  }
  if (sub == "entropy") {
    const EntropyExperimentReport rep = run_entropy(cfg);
    std::printf("H(0) %.6g, seed %.6g, rate %.6g\n", rep.series.h0,
                rep.series.gronwall_seed, rep.rate);
    return finish(rep.checks, cfg.out_dir);
  }
  std::fprintf(stderr, "unknown subcommand: %s\n", sub.c_str());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spring-mass chain continuum-limit simulator and diagnostics"};
  app.set_version_flag("--version", "contlim 0.1.0");
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 1;

  const std::vector<std::string> subs = {"simulate", "converge", "uniqueness",
                                         "trace",    "young",    "entropy"};
  for (const auto& name : subs) {
    auto* sc = app.add_subcommand(name);
    sc->add_option("--config", config_path, "experiment config file")
        ->required();
    sc->add_option("--out", out_dir, "output directory (overrides config)");
    sc->add_option("--threads", threads, "worker threads for refinement sweeps");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig cfg = load_experiment_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.threads = threads;
    return dispatch(app.get_subcommands().front()->get_name(), std::move(cfg));
  } catch (const config_error& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const horizon_error& e) {
    std::fprintf(stderr, "horizon error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
