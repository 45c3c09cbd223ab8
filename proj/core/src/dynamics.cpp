#include "fwm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fwm/errors.hpp"

namespace fwm {

namespace {

double inf_norm(const CMatrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

CVector expm_apply(const CMatrix& h, const CVector& psi, double dt) {
  const double scale = kTwoPi * std::abs(dt) * (h.size() ? inf_norm(h) : 0.0);
  const int pieces = std::max(1, static_cast<int>(std::ceil(scale / 0.5)));
  const cplx factor(0.0, -kTwoPi * dt / pieces);
  CVector v = psi;
  for (int p = 0; p < pieces; ++p) {
    CVector term = v;
    CVector sum = v;
    for (int k = 1; k < 60; ++k) {
      term = (factor / static_cast<double>(k)) * (h * term);
      sum += term;
      if (term.norm() <= 1e-17 * (1.0 + sum.norm())) break;
    }
    v = std::move(sum);
  }
  return v;
}

void cf4_step(const Hamiltonian& h, CVector& psi, double t, double dt) {
  static const double r3 = std::sqrt(3.0);
  static const double c1 = 0.5 - r3 / 6.0, c2 = 0.5 + r3 / 6.0;
  static const double a1 = (3.0 - 2.0 * r3) / 12.0, a2 = (3.0 + 2.0 * r3) / 12.0;
  const CMatrix h1 = h.at(t + c1 * dt);
  const CMatrix h2 = h.at(t + c2 * dt);
  psi = expm_apply(a2 * h1 + a1 * h2, psi, dt);
  psi = expm_apply(a1 * h1 + a2 * h2, psi, dt);
}

StaticPropagator::StaticPropagator(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition of the Hamiltonian failed");
  w_ = eig.eigenvalues();
  v_ = eig.eigenvectors();
}

CVector StaticPropagator::apply(const CVector& psi, double t) const {
  CVector c = v_.adjoint() * psi;
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -kTwoPi * w_(k) * t);
  return v_ * c;
}

namespace {

struct Recorder {
  const std::vector<StateVector>& refs;
  const PropagationOptions& opts;
  const FockCutoffs cutoffs;
  Trajectory traj;

  void record(double t, const CVector& psi) {
    CVector v = psi;
    if (opts.frame.size() > 0) v = frame_phases(opts.frame, t).conjugate().cwiseProduct(psi);
    traj.times.push_back(t);
    const double n = v.norm();
    traj.norms.push_back(n);
    traj.norm_drift = std::max(traj.norm_drift, std::abs(n - 1.0));
    for (std::size_t k = 0; k < refs.size(); ++k)
      traj.overlaps[k].push_back(refs[k].amplitudes().dot(v));
    if (opts.store_states) traj.states.emplace_back(cutoffs, v);
    traj.final_state = StateVector(cutoffs, v);
  }
};

Trajectory integrate(const Hamiltonian& h, const StateVector& psi0, double t_end,
                     const std::vector<StateVector>& refs, const PropagationOptions& opts,
                     int samples, int substeps) {
  Recorder rec{refs, opts, psi0.cutoffs(), {}};
  rec.traj.overlaps.resize(refs.size());
  const double spacing = samples > 1 ? t_end / (samples - 1) : 0.0;
  const double dt = substeps > 0 ? spacing / substeps : 0.0;
  rec.traj.step = dt;
  CVector psi = psi0.amplitudes();
  rec.record(0.0, psi);
  for (int s = 1; s < samples; ++s) {
    const double t0 = (s - 1) * spacing;
    for (int k = 0; k < substeps; ++k) cf4_step(h, psi, t0 + k * dt, dt);
    rec.record(s == samples - 1 ? t_end : s * spacing, psi);
  }
  return std::move(rec.traj);
}

double final_difference(const Trajectory& a, const Trajectory& b) {
  if (a.overlaps.empty()) return (a.final_state.amplitudes() - b.final_state.amplitudes()).norm();
  double worst = 0.0;
  for (std::size_t k = 0; k < a.overlaps.size(); ++k)
    worst = std::max(worst, std::abs(a.overlaps[k].back() - b.overlaps[k].back()));
  return worst;
}

}  // namespace

Trajectory propagate(const Hamiltonian& h, const StateVector& psi0, double t_end,
                     const std::vector<StateVector>& refs, const PropagationOptions& opts) {
  if (psi0.dim() != h.dim()) throw std::invalid_argument("propagate: state and Hamiltonian dimensions differ");
  if (std::abs(psi0.norm() - 1.0) > kNormDriftLimit) throw std::invalid_argument("propagate: initial state is not normalized");
  if (!(t_end >= 0.0)) throw std::invalid_argument("propagate: t_end must be >= 0");
  for (const auto& r : refs)
    if (r.dim() != psi0.dim()) throw std::invalid_argument("propagate: reference dimension mismatch");
  if (opts.frame.size() != 0 && opts.frame.size() != psi0.dim())
    throw std::invalid_argument("propagate: frame generator dimension mismatch");

  const int samples = t_end == 0.0 ? 1 : std::max(2, opts.samples);
  const bool is_static = h.is_static();
  bool spectral = opts.method == PropagationMethod::spectral ||
                  (opts.method == PropagationMethod::automatic && is_static);
  if (spectral && !is_static) throw std::invalid_argument("spectral propagation needs a static Hamiltonian");

  Trajectory traj;
  if (spectral) {
    const StaticPropagator prop(h.at(0.0));
    Recorder rec{refs, opts, psi0.cutoffs(), {}};
    rec.traj.overlaps.resize(refs.size());
    const double spacing = samples > 1 ? t_end / (samples - 1) : 0.0;
    for (int s = 0; s < samples; ++s) {
      const double t = s == samples - 1 ? t_end : s * spacing;
      rec.record(t, prop.apply(psi0.amplitudes(), t));
    }
    traj = std::move(rec.traj);
  } else if (samples == 1) {
    traj = integrate(h, psi0, 0.0, refs, opts, 1, 0);
  } else {
    double max_step = opts.max_step;
    if (!(max_step > 0.0)) {
      const double bound = h.frequency_bound();
      max_step = t_end / 2000.0;
      if (bound > 0.0) max_step = std::min(max_step, 1.0 / (50.0 * bound));
    }
    const double spacing = t_end / (samples - 1);
    int sub = std::max(1, static_cast<int>(std::ceil(spacing / max_step - 1e-9)));
    traj = integrate(h, psi0, t_end, refs, opts, samples, sub);
    if (opts.convergence_tol > 0.0) {
      PropagationOptions lean = opts;
      lean.store_states = false;
      double diff = 0.0;
      int halvings = 0;
      for (;; ++halvings) {
        const Trajectory finer = integrate(h, psi0, t_end, refs, lean, 2, (samples - 1) * sub * 2);
        diff = final_difference(traj, finer);
        if (diff < opts.convergence_tol) break;
        if (halvings >= opts.max_halvings) {
          std::ostringstream msg;
          msg << "step-halving check failed after " << halvings << " halvings: final overlaps move by "
              << diff << " (step " << traj.step << " ns)";
          throw IntegrationError(msg.str());
        }
        sub *= 2;
        traj = integrate(h, psi0, t_end, refs, opts, samples, sub);
      }
      traj.halvings = halvings;
    }
  }

  if (traj.norm_drift > kNormDriftLimit) {
    std::ostringstream msg;
    msg << "norm drift " << traj.norm_drift << " exceeds " << kNormDriftLimit << " (step "
        << traj.step << " ns, " << traj.times.size() << " samples)";
    throw IntegrationError(msg.str());
  }
  return traj;
}

double leakage(const StateVector& psi, Level ground) {
  double inside = 0.0;
  for (int n1 = 0; n1 <= 1; ++n1)
    for (int n2 = 0; n2 <= 1; ++n2) inside += std::norm(psi.at(ground, n1, n2));
  return std::max(0.0, psi.norm() * psi.norm() - inside);
}

FidelityResult gate_fidelity(const StateVector& psi, const StateVector& target, Level ground,
                             double gate_time) {
  FidelityResult r;
  r.fidelity = std::clamp(std::norm(overlap(target, psi)), 0.0, 1.0);
  r.gate_time = gate_time;
  r.leakage = leakage(psi, ground);
  return r;
}

StateVector initial_state(Level ground, const FockCutoffs& c) {
  StateVector s(c);
  for (int n1 = 0; n1 <= 1; ++n1)
    for (int n2 = 0; n2 <= 1; ++n2) s.at(ground, n1, n2) = 0.5;
  return s;
}

StateVector target_state(const EffectiveParams& ep, double t, Level ground, const FockCutoffs& c) {
  const auto ph = controlled_phase_targets(ep, t);
  StateVector s(c);
  s.at(ground, 0, 0) = std::polar(0.5, ph[0]);
  s.at(ground, 0, 1) = std::polar(0.5, ph[1]);
  s.at(ground, 1, 0) = std::polar(0.5, ph[2]);
  s.at(ground, 1, 1) = std::polar(0.5, ph[3]);
  return s;
}

CzFidelity cz_fidelity(const StateVector& psi, Level ground) {
  return cz_fidelity(std::array<cplx, 4>{psi.at(ground, 0, 0), psi.at(ground, 0, 1),
                                         psi.at(ground, 1, 0), psi.at(ground, 1, 1)});
}

CzFidelity cz_fidelity(const std::array<cplx, 4>& amps) {
  const auto [a00, a01, a10, a11] = amps;
  auto value = [&](double p1, double p2) {
    const cplx e1 = std::polar(1.0, -p1), e2 = std::polar(1.0, -p2);
    return std::norm(0.5 * (a00 + a01 * e2 + a10 * e1 - a11 * e1 * e2));
  };
  CzFidelity best;
  best.fidelity = -1.0;
  // Coordinate ascent: each update is the exact maximizer in one phase.
  for (double start : {0.0, 0.5 * std::numbers::pi, std::numbers::pi, 1.5 * std::numbers::pi}) {
    double p1 = 0.0, p2 = start;
    for (int it = 0; it < 200; ++it) {
      const cplx e2 = std::polar(1.0, -p2);
      p1 = std::arg(a10 - a11 * e2) - std::arg(a00 + a01 * e2);
      const cplx e1 = std::polar(1.0, -p1);
      const double next = std::arg(a01 - a11 * e1) - std::arg(a00 + a10 * e1);
      const bool done = std::abs(std::remainder(next - p2, 2.0 * std::numbers::pi)) < 1e-14;
      p2 = next;
      if (done) break;
    }
    const double f = value(p1, p2);
    if (f > best.fidelity) best = {f, std::remainder(p1, 2.0 * std::numbers::pi), std::remainder(p2, 2.0 * std::numbers::pi)};
  }
  best.fidelity = std::clamp(best.fidelity, 0.0, 1.0);
  return best;
}

}  // namespace fwm
