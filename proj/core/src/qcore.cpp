#include "fwm/qcore.hpp"

#include <cmath>

namespace fwm {

char level_name(Level l) { return "abcd"[index_of(l)]; }

Level parse_level(char c) {
  switch (c) {
    case 'a': return Level::a;
    case 'b': return Level::b;
    case 'c': return Level::c;
    case 'd': return Level::d;
    default: throw std::invalid_argument(std::string("unknown level '") + c + "'");
  }
}

void FockCutoffs::validate() const {
  if (n_max1 < 1 || n_max2 < 1)
    throw std::invalid_argument("Fock cutoffs must be >= 1 for both modes");
}

int FockCutoffs::index(Level q, int n1, int n2) const {
  if (n1 < 0 || n1 > n_max1 || n2 < 0 || n2 > n_max2)
    throw std::out_of_range("Fock index outside cutoff");
  return index_of(q) * dim1() * dim2() + n1 * dim2() + n2;
}

StateVector::StateVector(FockCutoffs cutoffs) : cutoffs_(cutoffs) {
  cutoffs_.validate();
  amps_ = CVector::Zero(cutoffs_.total_dim());
}

StateVector::StateVector(FockCutoffs cutoffs, CVector amplitudes)
    : cutoffs_(cutoffs), amps_(std::move(amplitudes)) {
  cutoffs_.validate();
  if (amps_.size() != cutoffs_.total_dim())
    throw std::invalid_argument("state amplitude count does not match cutoffs");
}

StateVector StateVector::basis(FockCutoffs cutoffs, Level q, int n1, int n2) {
  StateVector s(cutoffs);
  s.at(q, n1, n2) = 1.0;
  return s;
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  return StateVector(cutoffs_, amps_ / n);
}

double hermiticity_defect(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

OperatorMatrix::OperatorMatrix(CMatrix m, bool hermitian) : m_(std::move(m)), hermitian_(hermitian) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("operator matrix must be square");
  if (hermitian_ && hermiticity_defect(m_) >= kHermitianTolerance)
    throw std::invalid_argument("matrix flagged hermitian violates the hermiticity bound");
}

OperatorMatrix OperatorMatrix::adjoint() const { return OperatorMatrix(m_.adjoint(), hermitian_); }

OperatorMatrix operator*(const OperatorMatrix& x, const OperatorMatrix& y) {
  return OperatorMatrix(x.m_ * y.m_);
}

OperatorMatrix operator+(const OperatorMatrix& x, const OperatorMatrix& y) {
  CMatrix s = x.m_ + y.m_;
  const bool h = x.hermitian_ && y.hermitian_ && hermiticity_defect(s) < OperatorMatrix::kHermitianTolerance;
  return OperatorMatrix(std::move(s), h);
}

OperatorMatrix operator-(const OperatorMatrix& x, const OperatorMatrix& y) {
  CMatrix s = x.m_ - y.m_;
  const bool h = x.hermitian_ && y.hermitian_ && hermiticity_defect(s) < OperatorMatrix::kHermitianTolerance;
  return OperatorMatrix(std::move(s), h);
}

OperatorMatrix operator*(cplx s, const OperatorMatrix& x) {
  const bool h = x.hermitian_ && s.imag() == 0.0;
  return OperatorMatrix(s * x.m_, h);
}

namespace {

Eigen::MatrixXcd ladder(int dim, LadderKind kind) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  switch (kind) {
    case LadderKind::annihilate: return a;
    case LadderKind::create: return a.adjoint();
    case LadderKind::number: {
      Eigen::MatrixXcd num = Eigen::MatrixXcd::Zero(dim, dim);
      for (int n = 0; n < dim; ++n) num(n, n) = static_cast<double>(n);
      return num;
    }
  }
  return a;
}

CMatrix kron(const CMatrix& x, const CMatrix& y) {
  CMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

}  // namespace

OperatorMatrix build_mode_operator(int mode, LadderKind kind, const FockCutoffs& cutoffs) {
  cutoffs.validate();
  if (mode != 1 && mode != 2) throw std::invalid_argument("mode index must be 1 or 2");
  const CMatrix i4 = CMatrix::Identity(4, 4);
  const CMatrix i1 = CMatrix::Identity(cutoffs.dim1(), cutoffs.dim1());
  const CMatrix i2 = CMatrix::Identity(cutoffs.dim2(), cutoffs.dim2());
  const CMatrix m = mode == 1 ? kron(kron(i4, ladder(cutoffs.dim1(), kind)), i2)
                              : kron(kron(i4, i1), ladder(cutoffs.dim2(), kind));
  return OperatorMatrix(m, kind == LadderKind::number);
}

OperatorMatrix build_transition_operator(Level i, Level j, const FockCutoffs& cutoffs) {
  Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
  s(index_of(i), index_of(j)) = 1.0;
  return OperatorMatrix(embed_level_matrix(s, cutoffs), i == j);
}

OperatorMatrix identity_operator(const FockCutoffs& cutoffs) {
  cutoffs.validate();
  return OperatorMatrix(CMatrix::Identity(cutoffs.total_dim(), cutoffs.total_dim()), true);
}

CMatrix embed_level_matrix(const Eigen::Matrix4cd& m, const FockCutoffs& cutoffs) {
  cutoffs.validate();
  const int block = cutoffs.dim1() * cutoffs.dim2();
  return kron(CMatrix(m), CMatrix::Identity(block, block));
}

cplx overlap(const StateVector& psi, const StateVector& phi) {
  if (psi.dim() != phi.dim()) throw std::invalid_argument("overlap: dimension mismatch");
  return psi.amplitudes().dot(phi.amplitudes());
}

void Hamiltonian::add_term(CMatrix op, double frequency) {
  if (op.rows() != static_.rows() || op.cols() != static_.cols())
    throw std::invalid_argument("oscillating term dimension mismatch");
  terms_.push_back({std::move(op), frequency});
}

bool Hamiltonian::is_static() const {
  for (const auto& t : terms_)
    if (t.frequency != 0.0 && t.op.cwiseAbs().maxCoeff() > 0.0) return false;
  return true;
}

CMatrix Hamiltonian::at(double t) const {
  CMatrix h = static_;
  for (const auto& term : terms_) {
    const cplx phase = std::polar(1.0, kTwoPi * term.frequency * t);
    h += phase * term.op;
    h += std::conj(phase) * term.op.adjoint();
  }
  return h;
}

double Hamiltonian::frequency_bound() const {
  auto inf_norm = [](const CMatrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); };
  double bound = static_.size() ? inf_norm(static_) : 0.0;
  for (const auto& term : terms_) bound += 2.0 * inf_norm(term.op) + std::abs(term.frequency);
  return bound;
}

}  // namespace fwm
