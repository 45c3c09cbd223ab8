#include <gtest/gtest.h>

#include <numbers>

#include "fwm/effective.hpp"
#include "fwm/errors.hpp"
#include "test_support.hpp"

using namespace fwm;
namespace t = fwm::testing;

TEST(ClosedForm, CrossKerrQuotedSet) {
  const EffectiveParams ep = effective_params(t::ck_frame());
  EXPECT_NEAR(ep.chi_abs() * 1e3, 6.3, 0.2);
  EXPECT_NEAR(ep.gate_time, 79.4, 2.0);
  EXPECT_DOUBLE_EQ(ep.delta_f, 0.0);
}

TEST(ClosedForm, CrossKerrMatchesIndependentEvaluation) {
  const SchemeFrame f = t::ck_frame();
  const double g1 = f.g_eff[0], g2 = f.g_eff[1];
  const double d1 = -4.59, d2 = -4.93, dl = 0.17;
  const double chi = std::pow(1.0 / d1 + 1.0 / d2, 2) * g1 * g1 * g2 * g2 / dl;
  const EffectiveParams ep = effective_params(f);
  EXPECT_NEAR(ep.chi, chi, 1e-15);
  EXPECT_NEAR(ep.delta_eps1, g1 * g1 / d1, 1e-15);
  EXPECT_NEAR(ep.delta_eps2, g2 * g2 / d2, 1e-15);
  // The couplings are g_i times the sigma_x table entries of the dc and db legs.
  EXPECT_NEAR(std::abs(g1), 0.3 * std::abs(f.table.coefficient(1, Level::d, Level::c)), 1e-15);
  EXPECT_NEAR(std::abs(g2), 0.3 * std::abs(f.table.coefficient(2, Level::d, Level::b)), 1e-15);
}

TEST(ClosedForm, TwoModeSqueezeQuotedSet) {
  const EffectiveParams ep = effective_params(t::sq2_frame());
  EXPECT_NEAR(ep.chi_abs() * 1e3, 4.3, 0.2);
}

TEST(ClosedForm, SwapTimeFromQuotedBeamSplitterCoupling) {
  EXPECT_NEAR(canonical_gate_time(Scheme::BeamSplitter, 6.2e-3), 40.5, 2.0);
  EXPECT_NEAR(canonical_gate_time(Scheme::CrossKerr, -1e-3), 500.0, 1e-9);
  EXPECT_TRUE(std::isinf(canonical_gate_time(Scheme::TwoModeSqueeze, 0.0)));
}

TEST(ClosedForm, SingularDenominatorsThrow) {
  Detunings d;
  d.delta1 = -4.0;
  d.delta2 = -5.0;
  d.delta = 0.0;
  EXPECT_THROW(closed_form(Scheme::CrossKerr, d, {0.1, 0.1}, {0, 0}), SingularityError);
  d.delta = 0.1;
  d.delta1 = 0.0;
  EXPECT_THROW(closed_form(Scheme::BeamSplitter, d, {0.1, 0.1}, {1, 1}), SingularityError);
}

TEST(ClosedForm, ZeroCouplingGivesZeroChi) {
  CircuitParams p = t::ck_params();
  p.g1 = p.g2 = 0.0;
  const SchemeFrame f = build_scheme_frame(p, Scheme::CrossKerr, {}, {3, 3}, t::ck_detunings());
  const EffectiveParams ep = effective_params(f);
  EXPECT_EQ(ep.chi, 0.0);
  EXPECT_TRUE(std::isinf(ep.gate_time));
}

TEST(ClosedForm, BalancedDeltaF) {
  EXPECT_DOUBLE_EQ(balanced_delta_f(Scheme::BeamSplitter, 1.0, 3.0), 2.0);
  EXPECT_DOUBLE_EQ(balanced_delta_f(Scheme::TwoModeSqueeze, 1.0, 3.0), -4.0);
  EXPECT_DOUBLE_EQ(balanced_delta_f(Scheme::SingleModeSqueeze, 1.5, 0.0), 3.0);
  EXPECT_DOUBLE_EQ(balanced_delta_f(Scheme::CrossKerr, 1.0, 3.0), 0.0);
}

// Every closed form is homogeneous of degree one in (detunings, couplings, drives).
TEST(ClosedFormProperty, HomogeneousOfDegreeOne) {
  t::Gen gen(42);
  for (int k = 0; k < 400; ++k) {
    const Scheme s = kSchemes[gen.integer(0, 3)];
    Detunings d;
    d.delta1 = gen.signed_away_from_zero(0.5, 6.0);
    d.delta2 = gen.signed_away_from_zero(0.5, 6.0);
    d.delta = gen.signed_away_from_zero(0.05, 5.0);
    const std::array<double, 2> g{gen.uniform(0.0, 0.4), gen.uniform(0.0, 0.4)};
    const std::array<double, 2> o{gen.uniform(0.0, 2.0), gen.uniform(0.0, 2.0)};
    const double lambda = gen.uniform(0.1, 10.0);
    Detunings ds = d;
    ds.delta1 *= lambda;
    ds.delta2 *= lambda;
    ds.delta *= lambda;
    const EffectiveParams a = closed_form(s, d, g, o);
    const EffectiveParams b = closed_form(s, ds, {lambda * g[0], lambda * g[1]}, {lambda * o[0], lambda * o[1]});
    auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)); };
    EXPECT_TRUE(close(b.chi, lambda * a.chi)) << scheme_name(s);
    EXPECT_TRUE(close(b.delta_eps1, lambda * a.delta_eps1)) << scheme_name(s);
    EXPECT_TRUE(close(b.delta_eps2, lambda * a.delta_eps2)) << scheme_name(s);
    EXPECT_TRUE(close(b.delta_f, lambda * a.delta_f)) << scheme_name(s);
  }
}

TEST(ControlledPhase, TargetsFollowSingleAndTwoPhotonPhases) {
  EffectiveParams ep;
  ep.chi = 6e-3;
  ep.delta_eps1 = -0.02;
  ep.delta_eps2 = -0.013;
  const double tt = 37.0;
  const double w = 2.0 * std::numbers::pi;
  const auto ph = controlled_phase_targets(ep, tt);
  EXPECT_DOUBLE_EQ(ph[0], 0.0);
  EXPECT_NEAR(ph[1], -w * ep.delta_eps2 * tt, 1e-12);
  EXPECT_NEAR(ph[2], -w * ep.delta_eps1 * tt, 1e-12);
  EXPECT_NEAR(ph[3], -w * (ep.delta_eps1 + ep.delta_eps2 + ep.chi) * tt, 1e-12);

  // At the canonical gate time the conditional phase is pi.
  const auto g = controlled_phase_targets(ep, canonical_gate_time(Scheme::CrossKerr, ep.chi));
  EXPECT_NEAR(std::abs(g[3] - g[2] - g[1] + g[0]), std::numbers::pi, 1e-12);
}

namespace {

double column_mismatch(const CMatrix& x, const CMatrix& y, const std::vector<int>& cols) {
  double worst = 0.0;
  for (int c : cols) worst = std::max(worst, (x.col(c) - y.col(c)).norm());
  return worst;
}

}  // namespace

TEST(IdealOperations, BeamSplitterHeisenbergRelations) {
  const FockCutoffs c{12, 12};
  const CMatrix a1 = photon_ladder(1, c), a2 = photon_ladder(2, c);
  // Photon number is conserved, so columns with n1 + n2 <= 12 are free of truncation.
  std::vector<int> cols;
  for (int n1 = 0; n1 <= 12; ++n1)
    for (int n2 = 0; n1 + n2 <= 12; ++n2) cols.push_back(n1 * c.dim2() + n2);

  t::Gen gen(8);
  for (int k = 0; k < 5; ++k) {
    const double phi = gen.uniform(-3.0, 3.0), phase = gen.uniform(-3.0, 3.0);
    const CMatrix u = ideal_operation({IdealKind::beam_splitter, phi, phase, 1}, c).unitary;
    const cplx e = std::polar(1.0, phase);
    const CMatrix row1 = std::cos(phi) * a1 - e * std::sin(phi) * a2;
    const CMatrix row2 = std::cos(phi) * a2 + std::conj(e) * std::sin(phi) * a1;
    EXPECT_LT(column_mismatch(u.adjoint() * a1 * u, row1, cols), 1e-8);
    EXPECT_LT(column_mismatch(u.adjoint() * a2 * u, row2, cols), 1e-8);
  }
}

TEST(IdealOperations, PrintedBeamSplitterSecondRowIsNotUnitary) {
  // With -e^{-i phase} sin in the lower-left entry the mode map is not
  // unitary; with +e^{-i phase} sin it is.
  const double phi = 0.4, phase = 1.1;
  const cplx e = std::polar(1.0, phase);
  Eigen::Matrix2cd printed, fixed;
  printed << std::cos(phi), -e * std::sin(phi), -std::conj(e) * std::sin(phi), std::cos(phi);
  fixed << std::cos(phi), -e * std::sin(phi), std::conj(e) * std::sin(phi), std::cos(phi);
  EXPECT_GT((printed.adjoint() * printed - Eigen::Matrix2cd::Identity()).norm(), 0.1);
  EXPECT_LT((fixed.adjoint() * fixed - Eigen::Matrix2cd::Identity()).norm(), 1e-15);
}

TEST(IdealOperations, BeamSplitterSwapsAtQuarterTurn) {
  const FockCutoffs c{2, 2};
  const double phase = 0.7;
  const CMatrix u = ideal_operation({IdealKind::beam_splitter, std::numbers::pi / 2, phase, 1}, c).unitary;
  const int in = 1 * c.dim2() + 0, out = 0 * c.dim2() + 1;
  EXPECT_NEAR(std::abs(u(out, in)), 1.0, 1e-12);
  EXPECT_NEAR(std::arg(u(out, in) * std::polar(1.0, phase)), 0.0, 1e-12);
}

TEST(IdealOperations, TwoModeSqueezeHeisenbergOnLowPhotonStates) {
  const FockCutoffs c{20, 20};
  const double phi = 0.2;
  const IdealOperation op = ideal_operation({IdealKind::two_mode_squeeze, phi, 0.0, 1}, c);
  const CMatrix a1 = photon_ladder(1, c), a2 = photon_ladder(2, c);
  const CMatrix lhs = op.unitary.adjoint() * a1 * op.unitary;
  const CMatrix rhs = std::cosh(phi) * a1 + std::sinh(phi) * a2.adjoint();
  std::vector<int> cols;
  for (int n1 = 0; n1 <= 2; ++n1)
    for (int n2 = 0; n2 <= 2; ++n2) cols.push_back(n1 * c.dim2() + n2);
  EXPECT_LT(column_mismatch(lhs, rhs, cols), 1e-8);
  EXPECT_LT(op.truncation_error, kTruncationTolerance);
  EXPECT_GE(op.certified_fock, 2);
}

TEST(IdealOperations, SymplecticIdentity) {
  t::Gen gen(13);
  Eigen::MatrixXd j2(4, 4), j1(2, 2);
  j1 << 0, 1, -1, 0;
  j2.setZero();
  j2.block(0, 0, 2, 2) = j1;
  j2.block(2, 2, 2, 2) = j1;
  for (int k = 0; k < 8; ++k) {
    const double phi = gen.uniform(-0.25, 0.25);
    const auto two = ideal_operation({IdealKind::two_mode_squeeze, phi, 0.0, 1}, {10, 10});
    ASSERT_TRUE(two.symplectic.has_value());
    const Eigen::MatrixXd& s = *two.symplectic;
    EXPECT_NEAR(s(0, 0) * s(0, 0) - s(0, 2) * s(0, 2), 1.0, 1e-12);
    EXPECT_LT((s * j2 * s.transpose() - j2).cwiseAbs().maxCoeff(), 1e-12);

    const int mode = 1 + k % 2;
    const FockCutoffs wide = mode == 1 ? FockCutoffs{40, 1} : FockCutoffs{1, 40};
    const auto one = ideal_operation({IdealKind::single_mode_squeeze, phi, 0.0, mode}, wide);
    ASSERT_TRUE(one.symplectic.has_value());
    EXPECT_LT((*one.symplectic * j1 * one.symplectic->transpose() - j1).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(IdealOperations, UnresolvedSqueezeThrows) {
  EXPECT_THROW(ideal_operation({IdealKind::two_mode_squeeze, 2.0, 0.0, 1}, {3, 3}), TruncationError);
  EXPECT_THROW(ideal_operation({IdealKind::single_mode_squeeze, 1.5, 0.0, 1}, {3, 3}), TruncationError);
}

TEST(IdealOperations, DiagonalPhaseOperations) {
  const FockCutoffs c{3, 3};
  const double phi = 0.9;
  const CMatrix ps = ideal_operation({IdealKind::phase_shifter, phi, 0.0, 2}, c).unitary;
  const CMatrix ck = ideal_operation({IdealKind::cross_kerr, phi, 0.0, 1}, c).unitary;
  for (int n1 = 0; n1 <= 3; ++n1)
    for (int n2 = 0; n2 <= 3; ++n2) {
      const int i = n1 * c.dim2() + n2;
      EXPECT_NEAR(std::abs(ps(i, i) - std::polar(1.0, -phi * n2)), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(ck(i, i) - std::polar(1.0, -phi * n1 * n2)), 0.0, 1e-12);
    }
  EXPECT_NEAR(phase_shifter_angle(0.01, 50.0), 2.0 * std::numbers::pi * 0.5, 1e-12);
}
