#include <benchmark/benchmark.h>

#include "fwm/circuit.hpp"
#include "fwm/dynamics.hpp"
#include "fwm/optimize.hpp"

using namespace fwm;

namespace {

const CircuitParams kCk{8.45, 13.95, 4.0, -0.61, 10.0, 16.0, 0.3, 0.3};

SchemeFrame ck_frame(FockCutoffs c) {
  DetuningOverrides o;
  o.delta1 = -4.59;
  o.delta2 = -4.93;
  o.delta = 0.17;
  return build_scheme_frame(kCk, Scheme::CrossKerr, {}, c, o);
}

SchemeFrame bs_frame(FockCutoffs c) {
  const CircuitParams p{8.0, 15.0, 4.0, -0.68, 10.0, 16.0, 0.3, 0.3};
  DetuningOverrides o;
  o.delta1 = -4.0;
  o.delta2 = -4.0;
  o.delta = 3.49;
  return build_scheme_frame(p, Scheme::BeamSplitter, {{0, 1.5, 0}, {0, 1.5, 0}}, c, o);
}

}  // namespace

static void BM_Eigensystem(benchmark::State& state) {
  CircuitParams p = kCk;
  for (auto _ : state) {
    p.b0 += 1e-9;
    benchmark::DoNotOptimize(eigensystem(p));
  }
}
BENCHMARK(BM_Eigensystem);

static void BM_Cf4Step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SchemeFrame f = bs_frame({n, n});
  const Hamiltonian h = f.hamiltonian();
  CVector psi = StateVector::basis(f.cutoffs, Level::a, 1, 0).amplitudes();
  double t = 0.0;
  for (auto _ : state) {
    cf4_step(h, psi, t, 1e-3);
    t += 1e-3;
  }
  state.SetLabel("dim " + std::to_string(f.cutoffs.total_dim()));
}
BENCHMARK(BM_Cf4Step)->Arg(2)->Arg(3)->Arg(5);

static void BM_CrossKerrGateSpectral(benchmark::State& state) {
  const SchemeFrame f = ck_frame({3, 3});
  const StateVector psi0 = initial_state(Level::a, f.cutoffs);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(f.hamiltonian(), psi0, 79.0, {psi0}));
}
BENCHMARK(BM_CrossKerrGateSpectral)->Unit(benchmark::kMillisecond);

static void BM_Oracle(benchmark::State& state) {
  const SchemeFrame f = ck_frame({3, 3});
  for (auto _ : state) benchmark::DoNotOptimize(dressed_energy_oracle(f));
}
BENCHMARK(BM_Oracle)->Unit(benchmark::kMillisecond);

static void BM_EvaluatePoint(benchmark::State& state) {
  OptimizeSpec spec = default_optimize_spec(kCk);
  spec.cutoffs = {static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_point(spec, {8.45, 13.95, -0.61}));
}
BENCHMARK(BM_EvaluatePoint)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
