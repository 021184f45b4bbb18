#include <benchmark/benchmark.h>

#include <cmath>

#include "contlim/entropy.hpp"
#include "contlim/fields.hpp"
#include "contlim/lattice.hpp"
#include "contlim/young_measure.hpp"

using namespace contlim;

namespace {

LatticeState excited_state(int n) {
  LatticeState s = make_rest_lattice(n, 1.0);
  for (int i = 0; i < n; ++i) {
    const double x = s.eps * i;
    s.disp[static_cast<std::size_t>(i)] = 0.05 * std::sin(x);
    s.vel[static_cast<std::size_t>(i)] = 0.02 * std::cos(2.0 * x);
  }
  return s;
}

const Potential& nonlinear_pot() {
  static const Potential pot =
      Potential::power_plus_quadratic(4.0, 1.0, 1.0, {0.0, 2.0});
  return pot;
}

void BM_Acceleration(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LatticeState s = excited_state(n);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto _ : state) {
    acceleration(s, nonlinear_pot(), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Acceleration)->Arg(256)->Arg(1024)->Arg(8192);

void BM_VerletStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  LatticeState s = excited_state(n);
  IntegratorConfig cfg = make_cfl_config(s, nonlinear_pot(), 1.0, 0.5, 1);
  Integrator integ(std::move(s), nonlinear_pot(), cfg);
  for (auto _ : state) {
    integ.step();
    benchmark::DoNotOptimize(integ.state().disp.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_VerletStep)->Arg(256)->Arg(1024)->Arg(8192);

void BM_LpNorm(benchmark::State& state) {
  const FieldPair pair = interpolate_pair(excited_state(1024));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lp_norm(pair.u, 4.0));
  }
}
BENCHMARK(BM_LpNorm);

void BM_LpDistanceMerged(benchmark::State& state) {
  const FieldPair coarse = interpolate_pair(excited_state(1024));
  const FieldPair fine = interpolate_pair(excited_state(8192));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lp_distance(coarse.u, fine.u, 2.0));
  }
}
BENCHMARK(BM_LpDistanceMerged);

void BM_RelativeEntropyIntegral(benchmark::State& state) {
  const FieldPair pair = interpolate_pair(excited_state(1024));
  const auto ref = LinearExactSolution::single_cosine(1.0, 1.0, 1.0, 0.05, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        integrate_relative_entropy(pair, ref, nonlinear_pot(), 1.0, 0.0));
  }
}
BENCHMARK(BM_RelativeEntropyIntegral);

void BM_BuildMeasure(benchmark::State& state) {
  RefinementFamily family;
  family.energy = mechanical_energy(nonlinear_pot(), 1.0);
  for (int n : {256, 1024}) {
    family.levels.push_back(
        {kTwoPi / n, ValueField(interpolate_pair(excited_state(n)))});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_measure(family, 16, 128));
  }
}
BENCHMARK(BM_BuildMeasure);

}  // namespace

BENCHMARK_MAIN();
