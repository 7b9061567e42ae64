#include <benchmark/benchmark.h>

#include "dwell/bohmian.hpp"
#include "dwell/dynamics.hpp"
#include "dwell/units.hpp"

namespace {

dwell::PotentialSpec demo_potential() {
  dwell::PotentialSpec p;
  p.mass = dwell::units::mass_from_kg(1.5e-35);
  p.well_separation = 6.0;
  p.well_frequency = dwell::units::omega_from_rad_per_s(1.0e12);
  return p;
}

const dwell::ModePair& modes_at(int n) {
  static std::map<int, dwell::ModePair> cache;
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache
             .emplace(n, dwell::solve_modes(dwell::Grid1D::symmetric(n, 24.0),
                                            demo_potential()))
             .first;
  return it->second;
}

void BM_SolveModes(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto grid = dwell::Grid1D::symmetric(n, 24.0);
  const auto pot = demo_potential();
  for (auto _ : state) {
    benchmark::DoNotOptimize(dwell::solve_modes(grid, pot));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_SolveModes)->Arg(193)->Arg(1537)->Arg(12289)->Complexity();

void BM_Snapshot(benchmark::State& state) {
  const auto& m = modes_at(static_cast<int>(state.range(0)));
  const double T = m.period();
  dwell::SnapshotOptions opts;
  opts.tol_identity = 1.0;
  double t = 0.1 * T;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dwell::snapshot(m, t, opts));
    t += 0.013 * T;
  }
}
BENCHMARK(BM_Snapshot)->Arg(1537)->Arg(12289);

void BM_VelocityEval(benchmark::State& state) {
  const auto& m = modes_at(193);
  const dwell::VelocityField f(m);
  const double T = m.period();
  double y = -8.0, t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f(y, t));
    y += 0.37;
    if (y > 8.0) y = -8.0;
    t += 0.0021 * T;
    if (t > T) t = 0.0;
  }
}
BENCHMARK(BM_VelocityEval);

void BM_TrajectoryPeriod(benchmark::State& state) {
  const auto& m = modes_at(193);
  const double T = m.period();
  const int n_traj = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dwell::run_trajectories(m, n_traj, T, T / 2000.0, 2000, 1));
  }
  state.SetItemsProcessed(state.iterations() * n_traj * 2000);
}
BENCHMARK(BM_TrajectoryPeriod)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
