#pragma once

// Schroedinger propagation, overlap traces, gate fidelities and the
// dressed-energy oracle for effective couplings.

#include <array>
#include <vector>

#include "fwm/effective.hpp"
#include "fwm/qcore.hpp"
#include "fwm/schemes.hpp"

namespace fwm {

enum class PropagationMethod {
  automatic,  // spectral for static H, integrator otherwise
  integrator,
  spectral,
};

struct PropagationOptions {
  PropagationMethod method = PropagationMethod::automatic;
  // Recorded points including both ends; 1 records t = 0 only when t_end == 0.
  int samples = 2001;
  // Largest step; 0 selects min(t_end / 2000, 1 / (50 nu_bound)).
  double max_step = 0.0;
  // Rerun at half step until final overlaps (or the final state when no
  // references are given) move by less than this; 0 disables the check.
  double convergence_tol = 1e-8;
  int max_halvings = 6;
  bool store_states = false;
  // Diagonal of a frame generator H0; recorded states and overlaps are
  // taken in that frame. Empty means no rotation.
  Eigen::VectorXd frame;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  // overlaps[k][i] = <ref_k | psi(t_i)>.
  std::vector<std::vector<cplx>> overlaps;
  std::vector<double> norms;
  double norm_drift = 0;
  double step = 0;  // integrator step actually used (0 for spectral)
  int halvings = 0;
  StateVector final_state{FockCutoffs{}};
};

inline constexpr double kNormDriftLimit = 1e-9;

// Throws IntegrationError when the norm drifts beyond kNormDriftLimit or the
// step-halving check does not converge.
Trajectory propagate(const Hamiltonian& h, const StateVector& psi0, double t_end,
                     const std::vector<StateVector>& refs = {}, const PropagationOptions& opts = {});

// One fourth-order commutator-free Magnus step from t to t + dt, in place.
void cf4_step(const Hamiltonian& h, CVector& psi, double t, double dt);

// exp(-i 2 pi dt H) psi by scaled Taylor series.
CVector expm_apply(const CMatrix& h, const CVector& psi, double dt);

struct FidelityResult {
  double fidelity = 0;
  double gate_time = 0;
  double leakage = 0;
};

// Population outside ground (x) {0,1} (x) {0,1}.
double leakage(const StateVector& psi, Level ground);

FidelityResult gate_fidelity(const StateVector& psi, const StateVector& target, Level ground,
                             double gate_time = 0);

// (|g00> + |g01> + |g10> + |g11>) / 2.
StateVector initial_state(Level ground, const FockCutoffs& c);
// Initial state with the controlled-phase target phases applied at time t.
StateVector target_state(const EffectiveParams& ep, double t, Level ground, const FockCutoffs& c);

// Overlap-squared with the ideal controlled-Z on the computational block,
// maximized over local phases on each mode. phi1, phi2 are the phases.
struct CzFidelity {
  double fidelity = 0;
  double phi1 = 0, phi2 = 0;
};
CzFidelity cz_fidelity(const StateVector& psi, Level ground);
// Same on the amplitudes of (|g00>, |g01>, |g10>, |g11>).
CzFidelity cz_fidelity(const std::array<cplx, 4>& amps);

// Spectral propagator for a static H, reused across many times.
class StaticPropagator {
 public:
  explicit StaticPropagator(const CMatrix& h);
  CVector apply(const CVector& psi, double t) const;
  const Eigen::VectorXd& energies() const { return w_; }
  const CMatrix& vectors() const { return v_; }

 private:
  Eigen::VectorXd w_;
  CMatrix v_;
};

struct OracleOptions {
  int ramp_steps = 10;
  // Zero selects the per-scheme default: (1,1) for CrossKerr, BeamSplitter
  // and TwoModeSqueeze, (2,1) for SingleModeSqueeze.
  FockCutoffs cutoffs{0, 0};
  // Delta_F scan window around the frame value and its coarse grid size.
  double scan_halfwidth = 1.0;
  int scan_points = 2001;
  double min_overlap = 0.5;
};

struct OracleResult {
  EffectiveParams params;
  FockCutoffs cutoffs;
  // Smallest overlap seen while tracking labels (CrossKerr) or the
  // weights of the pair at the avoided crossing (other schemes).
  double tracking_overlap = 1;
  double delta_f_resonance = 0;
  double gap = 0;
};

// CrossKerr: chi from tracked dressed energies of (g; n1, n2), n in {0,1}.
// Other schemes: |chi| from the minimum avoided-crossing gap while Delta_F
// is scanned; chi is reported as a magnitude.
OracleResult dressed_energy_oracle(const SchemeFrame& frame, const OracleOptions& opts = {});

// Time-independent matrix equivalent to H_I0 + V_I with the frame's
// oscillations removed by a diagonal counter-rotation; all couplings are
// scaled by `coupling_scale` and four-photon terms use `delta_f`.
CMatrix static_equivalent(const SchemeFrame& frame, const FockCutoffs& c, double coupling_scale,
                          double delta_f);

}  // namespace fwm
