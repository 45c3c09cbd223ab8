#pragma once

// Closed-form effective parameters of the four schemes and the ideal
// bosonic operations they implement.

#include <array>
#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "fwm/qcore.hpp"
#include "fwm/schemes.hpp"

namespace fwm {

struct EffectiveParams {
  Scheme scheme = Scheme::CrossKerr;
  double chi = 0;  // signed, GHz
  double delta_eps1 = 0, delta_eps2 = 0;
  double delta_f = 0;
  double gate_time = 0;  // ns; infinite when chi == 0

  double chi_abs() const { return std::abs(chi); }
};

// Swap time 1/(4|chi|) for the beam splitter, 1/(2|chi|) otherwise.
double canonical_gate_time(Scheme s, double chi);

// Evaluates the closed forms with signed detunings. Throws SingularityError
// when a detuning in a denominator vanishes.
EffectiveParams closed_form(Scheme s, const Detunings& d, const std::array<double, 2>& g_eff,
                            const std::array<double, 2>& rabi);

// Delta_F that cancels the mode-shift mismatch (0 for CrossKerr).
double balanced_delta_f(Scheme s, double delta_eps1, double delta_eps2);

// closed_form on the frame's detunings, couplings and drives.
EffectiveParams effective_params(const SchemeFrame& frame);

// Phases on (|0102>, |0112>, |1102>, |1112>) after time t.
std::array<double, 4> controlled_phase_targets(const EffectiveParams& ep, double t);

enum class IdealKind { beam_splitter, two_mode_squeeze, single_mode_squeeze, phase_shifter, cross_kerr };

struct IdealOpSpec {
  IdealKind kind = IdealKind::beam_splitter;
  double phi = 0;    // accumulated angle, rad
  double phase = 0;  // beam splitter phase offset, rad
  int mode = 1;      // single-mode squeeze and phase shifter
};

// Angle accumulated by a phase shifter with frequency shift `shift` (GHz) over t ns.
inline double phase_shifter_angle(double shift, double t) { return kTwoPi * shift * t; }

// Unitaries act on the photon space only, index n1 * (n_max2 + 1) + n2.
//   beam splitter   U = exp(-i phi G), G = -i e^{i phase} a1^dag a2 + h.c.
//   two-mode sq.    U = exp(phi (a1^dag a2^dag - a1 a2))
//   single-mode sq. U = exp(phi (a^dag^2 - a^2))
//   phase shifter   U = exp(-i phi n)
//   cross-Kerr      U = exp(-i phi n1 n2)
struct IdealOperation {
  CMatrix unitary;
  // Heisenberg map on (x1, p1, x2, p2) or (x, p), squeezers only.
  std::optional<Eigen::MatrixXd> symplectic;
  // Squeezers: largest Fock index k such that every input with n_i <= k
  // agrees with a larger-cutoff reference to 1e-6 in state norm, and the
  // vacuum-column error. -1 and 0 for number-conserving operations.
  int certified_fock = -1;
  double truncation_error = 0;
};

inline constexpr double kTruncationTolerance = 1e-6;

// Throws TruncationError when the squeezed vacuum is not resolved.
IdealOperation ideal_operation(const IdealOpSpec& spec, const FockCutoffs& cutoffs);

// Photon-space ladder operator for checks: a_mode on dim1 x dim2.
CMatrix photon_ladder(int mode, const FockCutoffs& cutoffs);

}  // namespace fwm
