#include "fwm/effective.hpp"

#include <limits>
#include <vector>
#include <numeric>
#include <sstream>

#include "fwm/errors.hpp"

namespace fwm {

double canonical_gate_time(Scheme s, double chi) {
  if (chi == 0.0) return std::numeric_limits<double>::infinity();
  return (s == Scheme::BeamSplitter ? 0.25 : 0.5) / std::abs(chi);
}

namespace {

void require_nonzero(double v, const char* name, Scheme s) {
  if (v == 0.0)
    throw SingularityError(std::string(name) + " vanishes; " + scheme_name(s) +
                           " closed forms are singular");
}

}  // namespace

EffectiveParams closed_form(Scheme s, const Detunings& d, const std::array<double, 2>& g,
                            const std::array<double, 2>& rabi) {
  require_nonzero(d.delta1, "Delta_1", s);
  require_nonzero(d.delta2, "Delta_2", s);
  require_nonzero(d.delta, "delta", s);
  const double d1 = d.delta1, d2 = d.delta2, dl = d.delta;
  const double o1 = rabi[0], o2 = rabi[1];

  EffectiveParams ep;
  ep.scheme = s;
  switch (s) {
    case Scheme::BeamSplitter:
      ep.chi = o1 * o2 * g[0] * g[1] / (d1 * d2 * dl);
      ep.delta_eps1 = o1 * o1 * g[0] * g[0] / (d1 * d1 * dl);
      ep.delta_eps2 = o2 * o2 * g[1] * g[1] / (d2 * d2 * dl);
      break;
    case Scheme::CrossKerr: {
      const double inv = 1.0 / d1 + 1.0 / d2;
      ep.chi = inv * inv * g[0] * g[0] * g[1] * g[1] / dl;
      ep.delta_eps1 = g[0] * g[0] / d1;
      ep.delta_eps2 = g[1] * g[1] / d2;
      break;
    }
    case Scheme::TwoModeSqueeze:
      ep.chi = o1 * o2 * g[0] * g[1] / (d1 * d2 * dl);
      ep.delta_eps1 = o2 * o2 * g[0] * g[0] / (d2 * d2 * dl);
      ep.delta_eps2 = o1 * o1 * g[1] * g[1] / (d1 * d1 * dl);
      break;
    case Scheme::SingleModeSqueeze:
      ep.chi = o1 * o2 * g[0] * g[0] / (d1 * d2 * dl);
      ep.delta_eps1 = (dl / d1 + o1 * o1 / (d1 * d1) + o2 * o2 / (d2 * d2)) * g[0] * g[0] / dl;
      ep.delta_eps2 = 0.0;
      break;
  }
  ep.delta_f = balanced_delta_f(s, ep.delta_eps1, ep.delta_eps2);
  ep.gate_time = canonical_gate_time(s, ep.chi);
  return ep;
}

double balanced_delta_f(Scheme s, double de1, double de2) {
  switch (s) {
    case Scheme::BeamSplitter: return de2 - de1;
    case Scheme::CrossKerr: return 0.0;
    case Scheme::TwoModeSqueeze: return -de1 - de2;
    case Scheme::SingleModeSqueeze: return 2.0 * de1;
  }
  return 0.0;
}

EffectiveParams effective_params(const SchemeFrame& frame) {
  EffectiveParams ep = closed_form(frame.scheme, frame.detunings, frame.g_eff, frame.rabi);
  if (frame.scheme != Scheme::CrossKerr) ep.delta_f = frame.detunings.delta_f;
  return ep;
}

std::array<double, 4> controlled_phase_targets(const EffectiveParams& ep, double t) {
  return {0.0, -kTwoPi * ep.delta_eps2 * t, -kTwoPi * ep.delta_eps1 * t,
          -kTwoPi * (ep.delta_eps1 + ep.delta_eps2 + ep.chi) * t};
}

namespace {

CMatrix kron2(const CMatrix& x, const CMatrix& y) {
  CMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

CMatrix single_ladder(int dim) {
  CMatrix a = CMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// exp(-i phi G) for hermitian G, one eigendecomposition per connected block
// of G's sparsity pattern. The photon generators all conserve some number,
// so the blocks are short chains.
CMatrix exp_hermitian(const CMatrix& g, double phi) {
  const Eigen::Index n = g.rows();
  std::vector<Eigen::Index> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i)
      if (g(i, j) != cplx(0.0)) parent[find(i)] = find(j);

  std::vector<std::vector<Eigen::Index>> blocks(n);
  for (Eigen::Index i = 0; i < n; ++i) blocks[find(i)].push_back(i);

  CMatrix u = CMatrix::Zero(n, n);
  for (const auto& idx : blocks) {
    if (idx.empty()) continue;
    const auto m = static_cast<Eigen::Index>(idx.size());
    CMatrix sub(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = g(idx[a], idx[b]);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(sub);
    const auto& w = eig.eigenvalues();
    CVector ph(m);
    for (Eigen::Index k = 0; k < m; ++k) ph(k) = std::polar(1.0, -phi * w(k));
    const CMatrix blk = eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) u(idx[a], idx[b]) = blk(a, b);
  }
  return u;
}

CMatrix generator(const IdealOpSpec& spec, const FockCutoffs& c) {
  const CMatrix a = single_ladder(c.dim1()), b = single_ladder(c.dim2());
  const CMatrix i1 = CMatrix::Identity(c.dim1(), c.dim1()), i2 = CMatrix::Identity(c.dim2(), c.dim2());
  const cplx i(0.0, 1.0);
  switch (spec.kind) {
    case IdealKind::beam_splitter: {
      const CMatrix x = kron2(a.adjoint(), b);  // a1^dag a2
      const cplx e = std::polar(1.0, spec.phase);
      return -i * e * x + i * std::conj(e) * x.adjoint();
    }
    case IdealKind::two_mode_squeeze: {
      const CMatrix x = kron2(a.adjoint(), b.adjoint());
      return i * (x - x.adjoint());
    }
    case IdealKind::single_mode_squeeze: {
      const CMatrix x = spec.mode == 1 ? kron2(a.adjoint() * a.adjoint(), i2) : kron2(i1, b.adjoint() * b.adjoint());
      return i * (x - x.adjoint());
    }
    case IdealKind::phase_shifter:
      return spec.mode == 1 ? kron2(a.adjoint() * a, i2) : kron2(i1, b.adjoint() * b);
    case IdealKind::cross_kerr:
      return kron2(a.adjoint() * a, b.adjoint() * b);
  }
  return {};
}

}  // namespace

CMatrix photon_ladder(int mode, const FockCutoffs& c) {
  c.validate();
  if (mode != 1 && mode != 2) throw std::invalid_argument("mode index must be 1 or 2");
  return mode == 1 ? kron2(single_ladder(c.dim1()), CMatrix::Identity(c.dim2(), c.dim2()))
                   : kron2(CMatrix::Identity(c.dim1(), c.dim1()), single_ladder(c.dim2()));
}

IdealOperation ideal_operation(const IdealOpSpec& spec, const FockCutoffs& cutoffs) {
  cutoffs.validate();
  if (!std::isfinite(spec.phi)) throw std::invalid_argument("ideal operation angle must be finite");
  if (spec.mode != 1 && spec.mode != 2) throw std::invalid_argument("mode index must be 1 or 2");

  IdealOperation out;
  out.unitary = exp_hermitian(generator(spec, cutoffs), spec.phi);

  const bool squeeze =
      spec.kind == IdealKind::two_mode_squeeze || spec.kind == IdealKind::single_mode_squeeze;
  if (!squeeze) return out;

  const double phi = spec.phi;
  if (spec.kind == IdealKind::two_mode_squeeze) {
    const double c = std::cosh(phi), s = std::sinh(phi);
    Eigen::MatrixXd m(4, 4);
    m << c, 0, s, 0,
         0, c, 0, -s,
         s, 0, c, 0,
         0, -s, 0, c;
    out.symplectic = m;
  } else {
    Eigen::MatrixXd m(2, 2);
    m << std::exp(2.0 * phi), 0, 0, std::exp(-2.0 * phi);
    out.symplectic = m;
  }

  // Reference with generous headroom on both modes.
  FockCutoffs big{cutoffs.n_max1 + std::max(12, cutoffs.n_max1),
                  cutoffs.n_max2 + std::max(12, cutoffs.n_max2)};
  const CMatrix ref = exp_hermitian(generator(spec, big), spec.phi);
  auto column_error = [&](int n1, int n2) {
    const int small = n1 * cutoffs.dim2() + n2;
    const int large = n1 * big.dim2() + n2;
    CVector diff = ref.col(large);
    for (int k1 = 0; k1 <= cutoffs.n_max1; ++k1)
      for (int k2 = 0; k2 <= cutoffs.n_max2; ++k2)
        diff(k1 * big.dim2() + k2) -= out.unitary(k1 * cutoffs.dim2() + k2, small);
    return diff.norm();
  };

  out.truncation_error = column_error(0, 0);
  if (!(out.truncation_error < kTruncationTolerance)) {
    std::ostringstream msg;
    msg << "Fock cutoff (" << cutoffs.n_max1 << ", " << cutoffs.n_max2
        << ") too small for squeeze angle " << phi << ": vacuum error " << out.truncation_error;
    throw TruncationError(msg.str());
  }
  const int kmax = std::min(cutoffs.n_max1, cutoffs.n_max2);
  for (int k = 0; k <= kmax; ++k) {
    bool ok = true;
    for (int n1 = 0; n1 <= k && ok; ++n1)
      for (int n2 = 0; n2 <= k && ok; ++n2)
        ok = column_error(n1, n2) < kTruncationTolerance;
    if (!ok) break;
    out.certified_fock = k;
  }
  return out;
}

}  // namespace fwm
