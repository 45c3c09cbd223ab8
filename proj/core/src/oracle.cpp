#include <algorithm>
#include <cmath>
#include <sstream>

#include "fwm/dynamics.hpp"
#include "fwm/errors.hpp"

namespace fwm {

namespace {

CMatrix term_matrix(const FrameTerm& t, const FockCutoffs& c) {
  CMatrix op = build_transition_operator(t.dst, t.src, c).matrix();
  if (t.mode != 0)
    op = op * build_mode_operator(t.mode, t.create ? LadderKind::create : LadderKind::annihilate, c).matrix();
  return op;
}

bool all_couplings_vanish(const SchemeFrame& f) {
  return std::all_of(f.terms.begin(), f.terms.end(), [](const FrameTerm& t) { return t.coefficient == 0.0; });
}

FockCutoffs oracle_cutoffs(const SchemeFrame& f, const OracleOptions& o) {
  if (o.cutoffs.n_max1 > 0 && o.cutoffs.n_max2 > 0) return o.cutoffs;
  return f.scheme == Scheme::SingleModeSqueeze ? FockCutoffs{2, 1} : FockCutoffs{1, 1};
}

}  // namespace

CMatrix static_equivalent(const SchemeFrame& frame, const FockCutoffs& c, double coupling_scale,
                          double delta_f) {
  // Rotate by K = sum_q k_q sigma_qq + k_1 n_1 + k_2 n_2 so that every term
  // becomes stationary: k_dst - k_src -/+ k_mode = -nu.
  const int rows = static_cast<int>(frame.terms.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(std::max(rows, 1), 6);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(std::max(rows, 1));
  for (int r = 0; r < rows; ++r) {
    const auto& t = frame.terms[r];
    m(r, index_of(t.dst)) += 1.0;
    m(r, index_of(t.src)) -= 1.0;
    if (t.mode != 0) m(r, 3 + t.mode) += t.create ? 1.0 : -1.0;
    rhs(r) = -(t.four_photon ? delta_f : t.frequency);
  }
  const Eigen::VectorXd k = m.completeOrthogonalDecomposition().solve(rhs);
  if ((m * k - rhs).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("frame oscillations cannot be removed by a diagonal rotation");

  Eigen::VectorXd diag(c.total_dim());
  for (Level q : kLevels)
    for (int n1 = 0; n1 <= c.n_max1; ++n1)
      for (int n2 = 0; n2 <= c.n_max2; ++n2)
        diag(c.index(q, n1, n2)) =
            frame.level_detuning[index_of(q)] - (k(index_of(q)) + k(4) * n1 + k(5) * n2);
  CMatrix h = diag.cast<cplx>().asDiagonal();
  for (const auto& t : frame.terms) {
    const CMatrix op = (coupling_scale * t.coefficient) * term_matrix(t, c);
    h += op + op.adjoint();
  }
  return h;
}

namespace {

OracleResult cross_kerr_oracle(const SchemeFrame& frame, const OracleOptions& opts, FockCutoffs c) {
  const Level g = frame.ground;
  const std::array<std::array<int, 2>, 4> labels{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};
  std::array<CVector, 4> ref;
  for (int k = 0; k < 4; ++k) {
    ref[k] = CVector::Zero(c.total_dim());
    ref[k](c.index(g, labels[k][0], labels[k][1])) = 1.0;
  }
  std::array<double, 4> energy{};
  double worst = 1.0;
  for (int step = 1; step <= opts.ramp_steps; ++step) {
    const double s = static_cast<double>(step) / opts.ramp_steps;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(static_equivalent(frame, c, s, 0.0));
    const CMatrix& v = eig.eigenvectors();
    std::array<Eigen::Index, 4> picked{};
    for (int k = 0; k < 4; ++k) {
      const Eigen::VectorXd ov = (v.adjoint() * ref[k]).cwiseAbs();
      Eigen::Index best = 0;
      const double o = ov.maxCoeff(&best);
      if (o < opts.min_overlap) {
        std::ostringstream msg;
        msg << "label (" << level_name(g) << ";" << labels[k][0] << "," << labels[k][1]
            << ") lost at ramp step " << step << ": best overlap " << o;
        throw TrackingError(msg.str());
      }
      for (int j = 0; j < k; ++j)
        if (picked[j] == best) throw TrackingError("two labels collapsed onto one dressed state");
      picked[k] = best;
      worst = std::min(worst, o);
      ref[k] = v.col(best);
      energy[k] = eig.eigenvalues()(best);
    }
  }
  OracleResult r;
  r.cutoffs = c;
  r.tracking_overlap = worst;
  r.params.scheme = frame.scheme;
  r.params.chi = energy[3] - energy[1] - energy[2] + energy[0];
  r.params.delta_eps1 = energy[1] - energy[0];
  r.params.delta_eps2 = energy[2] - energy[0];
  r.params.gate_time = canonical_gate_time(frame.scheme, r.params.chi);
  return r;
}

struct GapSample {
  double gap = 0;
  double weight = 0;  // smaller of the two pair weights
};

OracleResult crossing_oracle(const SchemeFrame& frame, const OracleOptions& opts, FockCutoffs c) {
  const Level g = frame.ground;
  std::array<int, 2> pair{};
  double matrix_element = 1.0;
  switch (frame.scheme) {
    case Scheme::BeamSplitter: pair = {c.index(g, 1, 0), c.index(g, 0, 1)}; break;
    case Scheme::TwoModeSqueeze: pair = {c.index(g, 0, 0), c.index(g, 1, 1)}; break;
    case Scheme::SingleModeSqueeze:
      pair = {c.index(g, 0, 0), c.index(g, 2, 0)};
      matrix_element = std::sqrt(2.0);
      break;
    case Scheme::CrossKerr: break;
  }

  auto sample = [&](double x) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(static_equivalent(frame, c, 1.0, x));
    const CMatrix& v = eig.eigenvectors();
    Eigen::VectorXd w(v.cols());
    for (Eigen::Index k = 0; k < v.cols(); ++k) w(k) = std::norm(v(pair[0], k)) + std::norm(v(pair[1], k));
    Eigen::Index i1 = 0;
    w.maxCoeff(&i1);
    Eigen::VectorXd rest = w;
    rest(i1) = -1.0;
    Eigen::Index i2 = 0;
    rest.maxCoeff(&i2);
    return GapSample{std::abs(eig.eigenvalues()(i1) - eig.eigenvalues()(i2)), std::min(w(i1), w(i2))};
  };

  const int n = std::max(3, opts.scan_points);
  const double lo = frame.detunings.delta_f - opts.scan_halfwidth;
  const double hi = frame.detunings.delta_f + opts.scan_halfwidth;
  const double h = (hi - lo) / (n - 1);
  int best = 0;
  double best_gap = sample(lo).gap;
  for (int k = 1; k < n; ++k) {
    const double gk = sample(lo + k * h).gap;
    if (gk < best_gap) {
      best_gap = gk;
      best = k;
    }
  }
  // Golden-section refinement inside the neighbouring grid cells.
  double a = lo + std::max(best - 1, 0) * h, b = lo + std::min(best + 1, n - 1) * h;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = sample(x1).gap, f2 = sample(x2).gap;
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (f1 < f2) {
      b = x2, x2 = x1, f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = sample(x1).gap;
    } else {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = sample(x2).gap;
    }
  }
  const double x = 0.5 * (a + b);
  const GapSample at = sample(x);
  if (at.weight < opts.min_overlap) {
    std::ostringstream msg;
    msg << "avoided crossing not identified: pair weight " << at.weight << " at Delta_F = " << x;
    throw TrackingError(msg.str());
  }

  OracleResult r;
  r.cutoffs = c;
  r.tracking_overlap = at.weight;
  r.delta_f_resonance = x;
  r.gap = at.gap;
  r.params.scheme = frame.scheme;
  r.params.chi = at.gap / (2.0 * matrix_element);
  r.params.delta_f = x;
  r.params.gate_time = canonical_gate_time(frame.scheme, r.params.chi);
  return r;
}

}  // namespace

OracleResult dressed_energy_oracle(const SchemeFrame& frame, const OracleOptions& opts) {
  if (opts.ramp_steps < 1) throw std::invalid_argument("oracle ramp needs at least one step");
  const FockCutoffs c = oracle_cutoffs(frame, opts);
  c.validate();
  if (frame.scheme == Scheme::SingleModeSqueeze && c.n_max1 < 2)
    throw std::invalid_argument("single-mode squeeze oracle needs n_max1 >= 2");
  if (all_couplings_vanish(frame)) {
    OracleResult r;
    r.cutoffs = c;
    r.params.scheme = frame.scheme;
    r.params.delta_f = frame.detunings.delta_f;
    r.params.gate_time = canonical_gate_time(frame.scheme, 0.0);
    return r;
  }
  return frame.scheme == Scheme::CrossKerr ? cross_kerr_oracle(frame, opts, c)
                                           : crossing_oracle(frame, opts, c);
}

}  // namespace fwm
