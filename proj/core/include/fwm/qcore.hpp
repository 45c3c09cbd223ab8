#pragma once

// Dense numeric substrate for the toolbox: the tensor space
//   (four-level system) x (Fock mode 1) x (Fock mode 2)
// with flat index  q*(n_max1+1)*(n_max2+1) + n1*(n_max2+1) + n2,
// q in {a=0, b=1, c=2, d=3}. Every file output uses the same order.
//
// Units: energies and frequencies are ordinary frequencies in GHz, times
// in ns. A Hamiltonian H generates exp(-i 2*pi H t).

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fwm {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

enum class Level : int { a = 0, b = 1, c = 2, d = 3 };

inline constexpr std::array<Level, 4> kLevels{Level::a, Level::b, Level::c, Level::d};

constexpr int index_of(Level l) { return static_cast<int>(l); }
char level_name(Level l);
Level parse_level(char c);

// Truncation of the two resonator modes.
struct FockCutoffs {
  int n_max1 = 3;
  int n_max2 = 3;

  void validate() const;
  int dim1() const { return n_max1 + 1; }
  int dim2() const { return n_max2 + 1; }
  int total_dim() const { return 4 * dim1() * dim2(); }
  int index(Level q, int n1, int n2) const;

  friend bool operator==(const FockCutoffs&, const FockCutoffs&) = default;
};

class StateVector {
 public:
  explicit StateVector(FockCutoffs cutoffs);
  StateVector(FockCutoffs cutoffs, CVector amplitudes);

  static StateVector basis(FockCutoffs cutoffs, Level q, int n1, int n2);

  const FockCutoffs& cutoffs() const { return cutoffs_; }
  const CVector& amplitudes() const { return amps_; }
  CVector& amplitudes() { return amps_; }
  int dim() const { return static_cast<int>(amps_.size()); }

  cplx& at(Level q, int n1, int n2) { return amps_(cutoffs_.index(q, n1, n2)); }
  cplx at(Level q, int n1, int n2) const { return amps_(cutoffs_.index(q, n1, n2)); }

  double norm() const { return amps_.norm(); }
  StateVector normalized() const;

 private:
  FockCutoffs cutoffs_;
  CVector amps_;
};

// Square complex matrix on the tensor space. When flagged hermitian, the
// constructor enforces ||M - M^dagger||_inf < 1e-12.
class OperatorMatrix {
 public:
  static constexpr double kHermitianTolerance = 1e-12;

  OperatorMatrix() = default;
  explicit OperatorMatrix(CMatrix m, bool hermitian = false);

  const CMatrix& matrix() const { return m_; }
  bool hermitian() const { return hermitian_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  OperatorMatrix adjoint() const;

  friend OperatorMatrix operator*(const OperatorMatrix& x, const OperatorMatrix& y);
  friend OperatorMatrix operator+(const OperatorMatrix& x, const OperatorMatrix& y);
  friend OperatorMatrix operator-(const OperatorMatrix& x, const OperatorMatrix& y);
  friend OperatorMatrix operator*(cplx s, const OperatorMatrix& x);

 private:
  CMatrix m_;
  bool hermitian_ = false;
};

double hermiticity_defect(const CMatrix& m);

enum class LadderKind { annihilate, create, number };

OperatorMatrix build_mode_operator(int mode, LadderKind kind, const FockCutoffs& cutoffs);
OperatorMatrix build_transition_operator(Level i, Level j, const FockCutoffs& cutoffs);
OperatorMatrix identity_operator(const FockCutoffs& cutoffs);

// Embeds a 4x4 matrix acting on the four-level system as M (x) I (x) I.
CMatrix embed_level_matrix(const Eigen::Matrix4cd& m, const FockCutoffs& cutoffs);

cplx overlap(const StateVector& psi, const StateVector& phi);

// H(t) = static_part + sum_k ( op_k e^{i 2 pi nu_k t} + h.c. ).
struct OscillatingTerm {
  CMatrix op;
  double frequency = 0.0;
};

class Hamiltonian {
 public:
  Hamiltonian() = default;
  explicit Hamiltonian(CMatrix static_part) : static_(std::move(static_part)) {}

  void add_static(const CMatrix& m) { static_ += m; }
  void add_term(CMatrix op, double frequency);

  const CMatrix& static_part() const { return static_; }
  const std::vector<OscillatingTerm>& terms() const { return terms_; }
  int dim() const { return static_cast<int>(static_.rows()); }
  bool is_static() const;

  CMatrix at(double t) const;
  // Cheap upper bound on the fastest frequency present, in GHz.
  double frequency_bound() const;

 private:
  CMatrix static_;
  std::vector<OscillatingTerm> terms_;
};

}  // namespace fwm
