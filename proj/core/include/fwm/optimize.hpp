#pragma once

// Controlled-phase fidelity maximization of the cross-Kerr scheme under the
// full Hamiltonian, over (E_J1, E_J2, b0) and the gate time.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "fwm/circuit.hpp"
#include "fwm/qcore.hpp"

namespace fwm {

struct Interval {
  double lo = 0, hi = 0;
  bool contains(double x) const { return x >= lo && x <= hi; }
  double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

struct OptimizeSpec {
  // E_mx is taken from here; E_J1, E_J2, b0 give the reference point.
  CircuitParams base;
  Interval e_j1, e_j2, b0;
  // Gate-time window in units of 1/(2|chi|) at each point.
  Interval time_scale{0.5, 1.6};
  // Absolute gate-time bounds in ns, intersected with the window above.
  Interval gate_time_ns{0.0, std::numeric_limits<double>::infinity()};
  int budget = 300;
  std::uint64_t seed = 1;
  FockCutoffs cutoffs{3, 3};
  int time_samples = 1101;
  // Share of the budget spent on the jittered coarse grid.
  double grid_fraction = 0.4;
};

// Bounds of +-span (relative) around the reference point of `base`; b0 by
// |b0| * span. The absolute gate-time bounds are the time_scale window at the
// reference point, which keeps optimized gates as fast as the reference gate.
OptimizeSpec default_optimize_spec(const CircuitParams& base, double span = 0.1);

struct Evaluation {
  std::array<double, 3> params{};  // E_J1, E_J2, b0
  double fidelity = 0;
  double gate_time = 0;
  bool ok = false;
};

struct OptimizationResult {
  double e_mx = 0;
  std::array<double, 3> best_params{};
  double best_gate_time = 0;
  double fidelity = 0;
  int evaluations = 0;
  std::vector<Evaluation> history;
};

// Full-Hamiltonian controlled-Z fidelity (local phases free) at time t, in
// the cross-Kerr frame of the given parameters.
double cz_fidelity_at(const CircuitParams& p, double t, const FockCutoffs& cutoffs);

// Best fidelity over the gate-time window for one parameter point.
Evaluation evaluate_point(const OptimizeSpec& spec, const std::array<double, 3>& x);

// Deterministic given the spec (seed included). Throws OptimizationError when
// no evaluation succeeds.
OptimizationResult maximize_fidelity(const OptimizeSpec& spec);

struct EmxSweepRow {
  double e_mx = 0;
  OptimizationResult result;
};

// One optimization per E_mx value with bounds re-centred on the reference point.
std::vector<EmxSweepRow> sweep_emx(const OptimizeSpec& spec, const std::vector<double>& e_mx_values);

// Header `emx_GHz,fidelity,gate_time_ns,EJ1,EJ2,b0`.
void write_emx_csv(std::ostream& os, const std::vector<EmxSweepRow>& rows);

}  // namespace fwm
