#pragma once

// Parameter model of the two-qubit toolbox: capacitance-derived couplings,
// the analytic four-level spectrum, sigma_x transition tables and b0 sweeps.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fwm/qcore.hpp"

namespace fwm {

// Capacitances in farads.
struct CapacitanceSet {
  double c_j1 = 0, c_j2 = 0;
  double c_g1 = 0, c_g2 = 0;
  double c_m = 0;
  double c_r1 = 0, c_r2 = 0;
  double c_01 = 0, c_02 = 0;

  void validate() const;
  double sigma1() const { return c_j1 + c_g1 + c_m; }
  double sigma2() const { return c_j2 + c_g2 + c_m; }
  double sigma_r1() const { return c_r1 + c_g1 + c_01; }
  double sigma_r2() const { return c_r2 + c_g2 + c_02; }

  // C_sigma_r >> C_sigma >> C_m, with ">>" meaning a factor of at least `ratio`.
  bool in_regime(double ratio = 10.0) const;
};

// Energy-level description; all values in GHz (ordinary frequency).
struct CircuitParams {
  double e_j1 = 0, e_j2 = 0;
  double e_mx = 0;
  double b0 = 0;  // E_Jm / 4 E_mx
  double omega_a1 = 0, omega_a2 = 0;
  double g1 = 0, g2 = 0;
  // Cross-talk couplings; zero unless derived or given.
  double g2_1 = 0, g2_2 = 0, g3 = 0;

  void validate() const;
};

struct DerivedCouplings {
  double e_mx = 0, g1 = 0, g2 = 0;
  double g2_1 = 0, g2_2 = 0, g3 = 0;
  // g2_i/g_i (== C_m/C_sigma_ibar) and g3/g_i.
  std::array<double, 2> crosstalk_ratio{};
  std::array<double, 2> resonator_crosstalk_ratio{};
  bool regime_ok = true;
  std::vector<std::string> warnings;
};

// E_mx from the approximate closed form; the exact capacitance-matrix inverse
// is not used.
DerivedCouplings derive_couplings(const CapacitanceSet& caps, double omega_a1, double omega_a2,
                                  double regime_ratio = 10.0);

inline constexpr double kDegeneracyThreshold = 1e-6;

// Qubit basis order (|0_1 0_2>, |0_1 1_2>, |1_1 0_2>, |1_1 1_2>) with
// sigma_z|0> = -|0>, so the uncoupled ground state is |0_1 0_2>.
struct EigenSystem {
  double e_a = 0, e_b = 0, e_c = 0, e_d = 0;
  double e_s_plus = 0, e_s_minus = 0;
  double theta_plus = 0, theta_minus = 0;

  double energy(Level l) const;
  std::array<double, 4> energies() const { return {e_a, e_b, e_c, e_d}; }
  // E_i - E_j
  double gap(Level i, Level j) const { return energy(i) - energy(j); }
  std::array<double, 4> eigenvector(Level l) const;
  // Columns are |a>, |b>, |c>, |d> in the qubit basis.
  Eigen::Matrix4d basis_change() const;
};

EigenSystem eigensystem(const CircuitParams& p);

// H_q in the qubit basis, for diagonalization checks.
Eigen::Matrix4d qubit_hamiltonian(const CircuitParams& p);

enum class Transition { ab, dc, db, ac };

// sigma_x1 / sigma_x2 projected on the eigenbasis: coefficients of
// (sigma_ab, sigma_dc, sigma_db, sigma_ac), each plus its hermitian conjugate.
struct TransitionTable {
  std::array<double, 4> x1{};
  std::array<double, 4> x2{};

  // Coefficient of sigma_ij (== that of sigma_ji) in sigma_x of `qubit`.
  double coefficient(int qubit, Level i, Level j) const;
  double effective_coupling(int qubit, double g, Level i, Level j) const {
    return g * coefficient(qubit, i, j);
  }
  Eigen::Matrix4d matrix(int qubit) const;
};

TransitionTable transition_table(const EigenSystem& es);

struct SweepRow {
  double b0 = 0;
  std::array<double, 4> energies{};
};

struct LevelCrossing {
  std::string pair;  // "a/b" or "c/d"
  double b0_low = 0, b0_high = 0;
};

struct EnergySweep {
  std::vector<SweepRow> rows;
  std::vector<LevelCrossing> crossings;
};

// `points` evenly spaced values including both ends; 1 point samples b0_from.
EnergySweep energy_sweep(const CircuitParams& p, double b0_from, double b0_to, int points);
EnergySweep energy_sweep(const CircuitParams& p, const std::vector<double>& b0_values);

// Header `b0,E_a,E_b,E_c,E_d`, 12 significant digits.
void write_sweep_csv(std::ostream& os, const EnergySweep& sweep);

}  // namespace fwm
