#pragma once

// Per-operation Hamiltonians: the lab-frame H_tot and, for each four-wave
// mixing scheme, the rotating-frame pair (H_I0, V_I(t)) with its detunings.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fwm/circuit.hpp"
#include "fwm/qcore.hpp"

namespace fwm {

enum class Scheme { BeamSplitter, CrossKerr, TwoModeSqueeze, SingleModeSqueeze };

inline constexpr std::array<Scheme, 4> kSchemes{Scheme::BeamSplitter, Scheme::CrossKerr,
                                                Scheme::TwoModeSqueeze, Scheme::SingleModeSqueeze};

// Short names bm, ck, sq2, sq1.
std::string scheme_key(Scheme s);
std::string scheme_name(Scheme s);
// Accepts short names and full names.
Scheme parse_scheme(const std::string& s);
Level ground_level(Scheme s);
int required_drives(Scheme s);

// In build_full_hamiltonian: H_p = 2 rabi cos(2 pi frequency t) sigma_x(target).
// In build_scheme_frame: `rabi` is the Rabi frequency of the driven eigenbasis
// transition. target_qubit 0 picks the qubit coupling more strongly to it.
struct DriveSpec {
  int target_qubit = 0;
  double rabi = 0;       // GHz
  double frequency = 0;  // GHz; ignored when a detuning override fixes it

  void validate() const;
};

struct DetuningOverrides {
  std::optional<double> delta1, delta2, delta, delta_f;
  bool empty() const { return !delta1 && !delta2 && !delta && !delta_f; }
};

struct Detunings {
  double delta1 = 0, delta2 = 0, delta = 0;
  double delta_f = 0;           // value used in the frame
  double delta_derived = 0;     // two-photon detuning implied by the frequencies
  double delta_f_matching = 0;  // four-photon mismatch implied by the frequencies
};

// One V_I term: coefficient * sigma_{dst src} * (mode op) * e^{i 2 pi nu t}, plus h.c.
// mode 0 means a classical drive (no mode operator). Terms flagged
// `four_photon` oscillate at the frame's Delta_F.
struct FrameTerm {
  Level dst = Level::a, src = Level::a;
  int mode = 0;
  bool create = false;
  double coefficient = 0;
  double frequency = 0;
  bool four_photon = false;
};

struct SchemeFrame {
  Scheme scheme = Scheme::CrossKerr;
  Level ground = Level::a;
  CircuitParams params;
  EigenSystem eigen;
  TransitionTable table;
  FockCutoffs cutoffs;
  Detunings detunings;

  // Diagonal of H_I0 per level.
  std::array<double, 4> level_detuning{};
  // Diagonal of the frame generator H0 per level, relative to E_ground;
  // photon energies omega_ai n_i are added on top.
  std::array<double, 4> frame_offset{};
  std::vector<FrameTerm> terms;

  std::array<double, 2> g_eff{};  // g~1, g~2
  std::array<double, 2> rabi{};   // Omega_1, Omega_2
  std::array<double, 2> drive_frequency{};

  CMatrix h_i0(const FockCutoffs& c) const;
  CMatrix h_i0() const { return h_i0(cutoffs); }
  // H_I0 + V_I(t).
  Hamiltonian hamiltonian(const FockCutoffs& c) const;
  Hamiltonian hamiltonian() const { return hamiltonian(cutoffs); }
  // Diagonal of H0 on the tensor space: E_ground + frame_offset + sum omega_ai n_i.
  Eigen::VectorXd frame_generator(const FockCutoffs& c) const;
  Eigen::VectorXd frame_generator() const { return frame_generator(cutoffs); }
  // Rotating-wave lab Hamiltonian H0 + H_I0 + F V_I F^dagger. Its propagator
  // maps onto the frame propagator exactly: U_I(t) = F(t)^dagger U_lab(t) F(0).
  Hamiltonian lab_counterpart(const FockCutoffs& c) const;
  // Physical drives reproducing the frame's Rabi frequencies in H_tot.
  std::vector<DriveSpec> lab_drives() const;
};

// F(t) = exp(-i 2 pi H0 t) as its diagonal.
CVector frame_phases(const Eigen::VectorXd& h0, double t);
// psi_frame = F(t)^dagger psi_lab.
StateVector to_frame(const StateVector& lab, const Eigen::VectorXd& h0, double t);

struct FullHamiltonianOptions {
  bool include_crosstalk = true;
};

// Every transition of the table, counter-rotating terms included.
Hamiltonian build_full_hamiltonian(const CircuitParams& p, const std::vector<DriveSpec>& drives,
                                   const FockCutoffs& cutoffs,
                                   const FullHamiltonianOptions& opts = {});

// Drives are listed as (drive 1, drive 2); CrossKerr takes none. Detuning
// overrides win over drive frequencies, which are then back-solved.
SchemeFrame build_scheme_frame(const CircuitParams& p, Scheme s,
                               const std::vector<DriveSpec>& drives, const FockCutoffs& cutoffs,
                               const DetuningOverrides& overrides = {});

struct DispersiveRatio {
  std::string name;
  double value = 0;
  bool flagged = false;
};

struct UnwantedTransition {
  std::string source;      // "mode1", "mode2", "drive1", "drive2"
  std::string transition;  // e.g. "ab"
  double coefficient = 0;  // sigma_x table entry
  double detuning = 0;     // source frequency - |E_i - E_j|, GHz
};

struct DispersiveReport {
  std::vector<DispersiveRatio> single_photon;
  std::vector<DispersiveRatio> two_photon;
  std::vector<UnwantedTransition> unwanted;
  double threshold = 0.25;
  bool ok = true;
};

DispersiveReport dispersive_check(const SchemeFrame& frame, double nbar1 = 1.0,
                                  double nbar2 = 1.0, double threshold = 0.25);

}  // namespace fwm
