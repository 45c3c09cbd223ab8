#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fwm/dynamics.hpp"
#include "fwm/errors.hpp"
#include "test_support.hpp"

using namespace fwm;
namespace t = fwm::testing;

namespace {

// Driven two-level system with a counter-rotating component.
Hamiltonian driven_qubit() {
  CMatrix h0 = CMatrix::Zero(2, 2);
  h0(0, 0) = -0.6;
  h0(1, 1) = 0.6;
  Hamiltonian h(h0);
  CMatrix x = CMatrix::Zero(2, 2);
  x(0, 1) = 0.35;
  x(1, 0) = 0.35;
  h.add_term(x, 1.1);
  return h;
}

CVector run_cf4(const Hamiltonian& h, CVector psi, double t_end, int steps) {
  const double dt = t_end / steps;
  for (int k = 0; k < steps; ++k) cf4_step(h, psi, k * dt, dt);
  return psi;
}

CMatrix exact_exp(const CMatrix& h, double dt) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  CVector ph(h.rows());
  for (Eigen::Index k = 0; k < ph.size(); ++k) ph(k) = std::polar(1.0, -2.0 * std::numbers::pi * dt * eig.eigenvalues()(k));
  return eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

TEST(Integrator, CommutatorFreeStepIsFourthOrder) {
  const Hamiltonian h = driven_qubit();
  CVector psi0(2);
  psi0 << 1.0, 0.0;
  const double tf = 3.0;
  const CVector ref = run_cf4(h, psi0, tf, 20000);
  double prev = 0.0;
  for (int n : {25, 50, 100, 200}) {
    const double err = (run_cf4(h, psi0, tf, n) - ref).norm();
    if (prev > 0.0) {
      const double order = std::log2(prev / err);
      EXPECT_GT(order, 3.7) << "steps " << n;
      EXPECT_LT(order, 4.5) << "steps " << n;
    }
    prev = err;
  }
}

TEST(Integrator, TaylorExponentialMatchesSpectral) {
  t::Gen gen(1);
  for (int k = 0; k < 10; ++k) {
    CMatrix a = CMatrix::Random(24, 24);
    const CMatrix h = 3.0 * (a + a.adjoint());
    const StateVector psi = gen.state({1, 2});
    const double dt = gen.uniform(-2.0, 2.0);
    const CVector got = expm_apply(h, psi.amplitudes(), dt);
    EXPECT_LT((got - exact_exp(h, dt) * psi.amplitudes()).norm(), 1e-11);
  }
}

TEST(Integrator, StaticPropagatorMatchesExponential) {
  const SchemeFrame f = t::ck_frame({2, 2});
  const CMatrix h = f.hamiltonian().at(0.0);
  const StaticPropagator p(h);
  t::Gen gen(4);
  const StateVector psi = gen.state({2, 2});
  EXPECT_LT((p.apply(psi.amplitudes(), 12.5) - exact_exp(h, 12.5) * psi.amplitudes()).norm(), 1e-10);
}

TEST(Propagate, SpectralAndIntegratorAgreeOnStaticFrame) {
  const SchemeFrame f = t::ck_frame({2, 2});
  const StateVector psi0 = initial_state(Level::a, f.cutoffs);
  PropagationOptions spec, integ;
  spec.method = PropagationMethod::spectral;
  integ.method = PropagationMethod::integrator;
  spec.samples = integ.samples = 201;
  const auto a = propagate(f.hamiltonian(), psi0, 20.0, {psi0}, spec);
  const auto b = propagate(f.hamiltonian(), psi0, 20.0, {psi0}, integ);
  EXPECT_LT((a.final_state.amplitudes() - b.final_state.amplitudes()).norm(), 1e-8);
  EXPECT_EQ(a.times.size(), 201u);
  EXPECT_DOUBLE_EQ(a.times.back(), 20.0);
}

TEST(Propagate, ZeroDurationRecordsOneSample) {
  const SchemeFrame f = t::bs_frame({2, 2});
  const StateVector psi0 = StateVector::basis(f.cutoffs, Level::a, 1, 0);
  const auto tr = propagate(f.hamiltonian(), psi0, 0.0, {psi0});
  ASSERT_EQ(tr.times.size(), 1u);
  EXPECT_EQ(tr.overlaps[0][0], cplx(1.0, 0.0));
  EXPECT_EQ(tr.norms[0], 1.0);
}

TEST(Propagate, NormIsConservedForDrivenFrames) {
  for (const SchemeFrame& f : {t::bs_frame({2, 2}), t::sq2_frame(2.0, {2, 2})}) {
    const StateVector psi0 = StateVector::basis(f.cutoffs, f.ground, 1, 0);
    PropagationOptions opts;
    opts.samples = 101;
    const auto tr = propagate(f.hamiltonian(), psi0, 10.0, {}, opts);
    EXPECT_LT(tr.norm_drift, kNormDriftLimit) << scheme_name(f.scheme);
  }
}

TEST(Propagate, CoarseStepFailsHalvingCheck) {
  const SchemeFrame f = t::bs_frame({1, 1});
  const StateVector psi0 = StateVector::basis(f.cutoffs, Level::a, 1, 0);
  PropagationOptions opts;
  opts.samples = 3;
  opts.max_step = 2.0;
  opts.max_halvings = 0;
  opts.convergence_tol = 1e-12;
  EXPECT_THROW(propagate(f.hamiltonian(), psi0, 8.0, {psi0}, opts), IntegrationError);
}

TEST(Propagate, RejectsBadInputs) {
  const SchemeFrame f = t::ck_frame({1, 1});
  StateVector psi0 = initial_state(Level::a, f.cutoffs);
  EXPECT_THROW(propagate(f.hamiltonian(), psi0, -1.0), std::invalid_argument);
  EXPECT_THROW(propagate(f.hamiltonian(), StateVector(FockCutoffs{2, 1}), 1.0), std::invalid_argument);
  psi0.amplitudes() *= 2.0;
  EXPECT_THROW(propagate(f.hamiltonian(), psi0, 1.0), std::invalid_argument);
  PropagationOptions opts;
  opts.method = PropagationMethod::spectral;
  const SchemeFrame bs = t::bs_frame({1, 1});
  EXPECT_THROW(propagate(bs.hamiltonian(), StateVector::basis(bs.cutoffs, Level::a, 0, 0), 1.0, {}, opts),
               std::invalid_argument);
}

TEST(CrossKerrRun, TargetOverlapAndSpectatorAmplitudes) {
  const SchemeFrame f = t::ck_frame();
  const EffectiveParams ep = effective_params(f);
  const StateVector psi0 = initial_state(Level::a, f.cutoffs);
  const StateVector target = target_state(ep, ep.gate_time, Level::a, f.cutoffs);
  const StateVector g00 = StateVector::basis(f.cutoffs, Level::a, 0, 0);
  const auto tr = propagate(f.hamiltonian(), psi0, ep.gate_time, {target, psi0, g00});
  EXPECT_GE(std::abs(tr.overlaps[0].back()), 0.99);
  for (const cplx& o : tr.overlaps[2]) EXPECT_NEAR(std::abs(o), 0.5, 0.02);
  EXPECT_NEAR(std::abs(tr.overlaps[1].front()), 1.0, 1e-12);
  EXPECT_LT(std::abs(tr.overlaps[1].back()), 0.6);
}

TEST(CrossKerrRun, PhotonNumberSectorsDoNotMix) {
  // The frame conserves n1 and n2, so raising the cutoff leaves the run unchanged.
  const EffectiveParams ep = effective_params(t::ck_frame());
  std::array<cplx, 2> last{};
  for (int k = 0; k < 2; ++k) {
    const FockCutoffs c{3 + k, 3 + k};
    const SchemeFrame f = t::ck_frame(c);
    const StateVector psi0 = initial_state(Level::a, c);
    const auto tr = propagate(f.hamiltonian(), psi0, ep.gate_time, {target_state(ep, ep.gate_time, Level::a, c)});
    last[k] = tr.overlaps[0].back();
  }
  EXPECT_LT(std::abs(last[0] - last[1]), 1e-12);
}

TEST(Fidelity, TargetStateCarriesControlledPhases) {
  EffectiveParams ep;
  ep.chi = 5e-3;
  ep.delta_eps1 = 0.01;
  ep.delta_eps2 = -0.02;
  const FockCutoffs c{2, 2};
  const StateVector s = target_state(ep, 40.0, Level::b, c);
  const auto ph = controlled_phase_targets(ep, 40.0);
  EXPECT_NEAR(std::abs(s.at(Level::b, 1, 1) - 0.5 * std::polar(1.0, ph[3])), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.at(Level::b, 0, 1) - 0.5 * std::polar(1.0, ph[1])), 0.0, 1e-15);
  EXPECT_NEAR(s.norm(), 1.0, 1e-15);
}

TEST(Fidelity, LeakageCountsPopulationOutsideTheBlock) {
  const FockCutoffs c{2, 2};
  StateVector s(c);
  s.at(Level::a, 0, 0) = std::sqrt(0.7);
  s.at(Level::c, 0, 0) = std::sqrt(0.2);
  s.at(Level::a, 2, 0) = std::sqrt(0.1);
  EXPECT_NEAR(leakage(s, Level::a), 0.3, 1e-15);
  const auto fr = gate_fidelity(s, StateVector::basis(c, Level::a, 0, 0), Level::a, 12.0);
  EXPECT_NEAR(fr.fidelity, 0.7, 1e-15);
  EXPECT_DOUBLE_EQ(fr.gate_time, 12.0);
}

TEST(Fidelity, ControlledZWithFreeLocalPhases) {
  t::Gen gen(21);
  for (int k = 0; k < 20; ++k) {
    const double p1 = gen.uniform(-3, 3), p2 = gen.uniform(-3, 3), g = gen.uniform(-3, 3);
    const std::array<cplx, 4> amps{0.5 * std::polar(1.0, g), 0.5 * std::polar(1.0, g + p2),
                                   0.5 * std::polar(1.0, g + p1), -0.5 * std::polar(1.0, g + p1 + p2)};
    EXPECT_NEAR(cz_fidelity(amps).fidelity, 1.0, 1e-9);
  }
  const std::array<cplx, 4> identity{0.5, 0.5, 0.5, 0.5};
  EXPECT_LT(cz_fidelity(identity).fidelity, 0.6);
}
