#include <gtest/gtest.h>

#include "fwm/dynamics.hpp"
#include "fwm/schemes.hpp"
#include "test_support.hpp"

using namespace fwm;
namespace t = fwm::testing;

TEST(SchemeNames, KeysRoundTrip) {
  for (Scheme s : kSchemes) {
    EXPECT_EQ(parse_scheme(scheme_key(s)), s);
    EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  }
  EXPECT_EQ(parse_scheme("ck"), Scheme::CrossKerr);
  EXPECT_THROW(parse_scheme("kerr"), std::invalid_argument);
  EXPECT_EQ(ground_level(Scheme::CrossKerr), Level::a);
  EXPECT_EQ(ground_level(Scheme::TwoModeSqueeze), Level::b);
  EXPECT_EQ(required_drives(Scheme::CrossKerr), 0);
  EXPECT_EQ(required_drives(Scheme::BeamSplitter), 2);
}

TEST(SchemeFrame, CrossKerrDerivedDetuningsNearQuotedValues) {
  const SchemeFrame f = build_scheme_frame(t::ck_params(), Scheme::CrossKerr, {}, {3, 3});
  EXPECT_NEAR(f.detunings.delta1, -4.59, 0.1);
  EXPECT_NEAR(f.detunings.delta2, -4.93, 0.1);
  EXPECT_NEAR(f.detunings.delta, 0.17, 0.1);
}

TEST(SchemeFrame, OverridesWinOverDerivedValues) {
  const SchemeFrame f = t::ck_frame();
  EXPECT_DOUBLE_EQ(f.detunings.delta1, -4.59);
  EXPECT_DOUBLE_EQ(f.detunings.delta2, -4.93);
  EXPECT_DOUBLE_EQ(f.detunings.delta, 0.17);
  EXPECT_EQ(f.ground, Level::a);
}

TEST(SchemeFrame, TwoModeSqueezeBackSolvedDriveFrequencies) {
  const SchemeFrame f = t::sq2_frame();
  EXPECT_NEAR(f.drive_frequency[0], 10.9, 0.1);
  EXPECT_NEAR(f.drive_frequency[1], 24.9, 0.1);
  EXPECT_NEAR(f.detunings.delta, -3.67, 0.01);
  EXPECT_EQ(f.ground, Level::b);
  // Forward consistency: Delta1 = omega1 - E_ab with the back-solved frequency.
  EXPECT_NEAR(f.drive_frequency[0] - f.eigen.gap(Level::a, Level::b), 3.0, 1e-12);
  EXPECT_NEAR(f.drive_frequency[1] - f.eigen.gap(Level::d, Level::b), -5.0, 1e-12);
}

TEST(SchemeFrame, FrequencyFormDrivesReproduceDetunings) {
  // Feed the back-solved frequencies in as plain drive frequencies.
  const SchemeFrame ref = t::sq2_frame();
  const std::vector<DriveSpec> drives{{0, 2.0, ref.drive_frequency[0]}, {0, 2.0, ref.drive_frequency[1]}};
  const SchemeFrame f = build_scheme_frame(t::sq2_params(), Scheme::TwoModeSqueeze, drives, {3, 3});
  EXPECT_NEAR(f.detunings.delta1, ref.detunings.delta1, 1e-9);
  EXPECT_NEAR(f.detunings.delta2, ref.detunings.delta2, 1e-9);
  EXPECT_NEAR(f.detunings.delta, ref.detunings.delta, 1e-9);
}

TEST(SchemeFrame, WrongDriveCountRejected) {
  EXPECT_THROW(build_scheme_frame(t::ck_params(), Scheme::CrossKerr, {{0, 1.0, 5.0}}, {3, 3}),
               std::invalid_argument);
  EXPECT_THROW(build_scheme_frame(t::sq2_params(), Scheme::TwoModeSqueeze, {}, {3, 3}), std::invalid_argument);
}

TEST(SchemeFrame, HamiltoniansAreHermitian) {
  t::Gen gen(5);
  for (const SchemeFrame& f : {t::ck_frame(), t::bs_frame(), t::sq2_frame(), t::sq1_frame()}) {
    const Hamiltonian h = f.hamiltonian();
    for (int k = 0; k < 10; ++k) EXPECT_LT(hermiticity_defect(h.at(gen.uniform(0, 200))), 1e-12);
    const Hamiltonian lab = f.lab_counterpart(f.cutoffs);
    EXPECT_LT(hermiticity_defect(lab.at(gen.uniform(0, 200))), 1e-12);
  }
}

TEST(SchemeFrame, CrossKerrFrameIsStatic) {
  EXPECT_TRUE(t::ck_frame().hamiltonian().is_static());
  EXPECT_FALSE(t::bs_frame().hamiltonian().is_static());
}

TEST(SchemeFrame, FrameAndLabPropagatorsAgree) {
  // U_I(t) psi = F(t)^dagger U_lab(t) psi for the rotating-wave lab counterpart.
  for (const SchemeFrame& f : {t::bs_frame({2, 2}), t::sq2_frame(2.0, {2, 2})}) {
    const FockCutoffs c = f.cutoffs;
    t::Gen gen(9);
    const StateVector psi0 = gen.state(c);
    const double tf = 0.6;
    PropagationOptions opts;
    opts.samples = 3;
    const Trajectory in_frame = propagate(f.hamiltonian(), psi0, tf, {}, opts);
    const Trajectory lab = propagate(f.lab_counterpart(c), psi0, tf, {}, opts);
    const StateVector mapped = to_frame(lab.final_state, f.frame_generator(), tf);
    EXPECT_LT((mapped.amplitudes() - in_frame.final_state.amplitudes()).norm(), 1e-7)
        << scheme_name(f.scheme);
    // Recording in the frame applies the same map.
    opts.frame = f.frame_generator();
    const Trajectory recorded = propagate(f.lab_counterpart(c), psi0, tf, {}, opts);
    EXPECT_LT((recorded.final_state.amplitudes() - mapped.amplitudes()).norm(), 1e-10)
        << scheme_name(f.scheme);
  }
}

TEST(FullHamiltonian, StructureAndDrives) {
  const CircuitParams p = t::ck_params();
  const FockCutoffs c{2, 2};
  const Hamiltonian h = build_full_hamiltonian(p, {}, c);
  EXPECT_TRUE(h.is_static());
  EXPECT_LT(hermiticity_defect(h.static_part()), 1e-12);
  // Diagonal holds E_q + n1 omega_a1 + n2 omega_a2.
  const EigenSystem es = eigensystem(p);
  EXPECT_NEAR(h.static_part()(c.index(Level::c, 2, 1), c.index(Level::c, 2, 1)).real(),
              es.e_c + 2 * p.omega_a1 + p.omega_a2, 1e-12);

  const Hamiltonian driven = build_full_hamiltonian(p, {{1, 0.2, 7.0}, {2, 0.1, 9.0}}, c);
  EXPECT_EQ(driven.terms().size(), 2u);
  EXPECT_FALSE(driven.is_static());
  EXPECT_THROW(build_full_hamiltonian(p, {{0, 0.2, 7.0}}, c), std::invalid_argument);
}

TEST(FullHamiltonian, CrosstalkToggle) {
  CircuitParams p = t::ck_params();
  p.g2_1 = 0.02;
  p.g2_2 = 0.03;
  p.g3 = 0.01;
  const FockCutoffs c{1, 1};
  const CMatrix with = build_full_hamiltonian(p, {}, c).static_part();
  const CMatrix without = build_full_hamiltonian(p, {}, c, {false}).static_part();
  EXPECT_GT((with - without).cwiseAbs().maxCoeff(), 0.005);
  p.g2_1 = p.g2_2 = p.g3 = 0.0;
  EXPECT_LT((build_full_hamiltonian(p, {}, c).static_part() - without).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LabDrives, ReproduceFrameRabiFrequencies) {
  const SchemeFrame f = t::sq2_frame();
  const auto drives = f.lab_drives();
  ASSERT_EQ(drives.size(), 2u);
  const std::array<std::pair<Level, Level>, 2> tr{{{Level::a, Level::b}, {Level::d, Level::b}}};
  for (int k = 0; k < 2; ++k) {
    const double coef = f.table.coefficient(drives[k].target_qubit, tr[k].first, tr[k].second);
    EXPECT_NEAR(drives[k].rabi * std::abs(coef), f.rabi[k], 1e-12);
    EXPECT_DOUBLE_EQ(drives[k].frequency, f.drive_frequency[k]);
  }
}

TEST(Dispersive, FlagsStrongDrives) {
  const DispersiveReport ck = dispersive_check(t::ck_frame());
  EXPECT_TRUE(ck.ok);
  EXPECT_FALSE(ck.single_photon.empty());
  const DispersiveReport sq = dispersive_check(t::sq2_frame());
  EXPECT_FALSE(sq.ok);
  bool found = false;
  for (const auto& r : sq.single_photon)
    if (r.flagged) {
      found = true;
      EXPECT_GT(r.value, 0.25);
    }
  EXPECT_TRUE(found);
  // A loose threshold clears the flags.
  EXPECT_TRUE(dispersive_check(t::sq2_frame(), 1.0, 1.0, 5.0).ok);
}
