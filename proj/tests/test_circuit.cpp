#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "fwm/circuit.hpp"
#include "fwm/errors.hpp"
#include "test_support.hpp"

using namespace fwm;
using fwm::testing::Gen;

namespace {

// H_q assembled from complex Pauli matrices, independent of qubit_hamiltonian().
Eigen::Matrix4cd pauli_hamiltonian(const CircuitParams& p) {
  Eigen::Matrix2cd sx, sy, sz, id;
  sx << 0, 1, 1, 0;
  sy << 0, cplx(0, -1), cplx(0, 1), 0;
  sz << -1, 0, 0, 1;
  id.setIdentity();
  auto kron = [](const Eigen::Matrix2cd& x, const Eigen::Matrix2cd& y) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = x(i, j) * y;
    return out;
  };
  return 0.5 * p.e_j1 * kron(sz, id) + 0.5 * p.e_j2 * kron(id, sz) +
         p.e_mx * (kron(sx, sx) + p.b0 * kron(sy, sy) + p.b0 * kron(sz, sz));
}

}  // namespace

TEST(Eigensystem, QubitHamiltonianMatchesPauliAssembly) {
  Gen gen(3);
  for (int k = 0; k < 50; ++k) {
    const CircuitParams p = gen.circuit();
    const Eigen::Matrix4cd ref = pauli_hamiltonian(p);
    EXPECT_LT((qubit_hamiltonian(p).cast<cplx>() - ref).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Eigensystem, MatchesBruteForceOnRandomDraws) {
  Gen gen(2024);
  for (int k = 0; k < 500; ++k) {
    const CircuitParams p = gen.circuit();
    const EigenSystem es = eigensystem(p);
    const Eigen::Matrix4cd h = pauli_hamiltonian(p);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(h);
    std::array<double, 4> analytic = es.energies();
    std::sort(analytic.begin(), analytic.end());
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(analytic[i], eig.eigenvalues()(i), 1e-10) << "draw " << k;

    const Eigen::Matrix4d v = es.basis_change();
    EXPECT_LT((v.transpose() * v - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    for (Level l : kLevels) {
      const Eigen::Vector4cd col = v.col(index_of(l)).cast<cplx>();
      EXPECT_LT((h * col - es.energy(l) * col).norm(), 1e-10) << "draw " << k << " level " << level_name(l);
    }
  }
}

TEST(Eigensystem, LevelOrderingAndSplittings) {
  const EigenSystem es = eigensystem(fwm::testing::ck_params());
  EXPECT_NEAR(es.e_d - es.e_a, es.e_s_plus, 1e-12);
  EXPECT_NEAR(es.e_c - es.e_b, es.e_s_minus, 1e-12);
  EXPECT_NEAR(es.gap(Level::c, Level::a), es.e_c - es.e_a, 0.0);
}

TEST(Eigensystem, DegenerateBlockThrows) {
  // E_J1 = E_J2 and b0 = -1 close the |01>,|10> gap.
  const CircuitParams p{7.0, 7.0, 3.0, -1.0, 10.0, 16.0, 0.3, 0.3};
  EXPECT_THROW(eigensystem(p), DegeneracyError);
  CircuitParams bad = p;
  bad.omega_a1 = 0.0;
  EXPECT_THROW(eigensystem(bad), std::invalid_argument);
}

TEST(TransitionTable, MatchesProjectedSigmaX) {
  Gen gen(77);
  Eigen::Matrix2d sx, id;
  sx << 0, 1, 1, 0;
  id.setIdentity();
  Eigen::Matrix4d x1, x2;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      x1.block<2, 2>(2 * i, 2 * j) = sx(i, j) * id;
      x2.block<2, 2>(2 * i, 2 * j) = id(i, j) * sx;
    }
  for (int k = 0; k < 200; ++k) {
    const EigenSystem es = eigensystem(gen.circuit());
    const TransitionTable t = transition_table(es);
    const Eigen::Matrix4d v = es.basis_change();
    EXPECT_LT((v.transpose() * x1 * v - t.matrix(1)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((v.transpose() * x2 * v - t.matrix(2)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(TransitionTable, ForbiddenPairsVanish) {
  const TransitionTable t = transition_table(eigensystem(fwm::testing::ck_params()));
  EXPECT_EQ(t.coefficient(1, Level::a, Level::d), 0.0);
  EXPECT_EQ(t.coefficient(2, Level::b, Level::c), 0.0);
  EXPECT_EQ(t.coefficient(1, Level::c, Level::d), t.coefficient(1, Level::d, Level::c));
  EXPECT_THROW(t.coefficient(3, Level::a, Level::b), std::invalid_argument);
}

TEST(Couplings, MutualCapacitanceEnergyAndRatios) {
  constexpr double e = 1.602176634e-19, h = 6.62607015e-34;
  CapacitanceSet c;
  c.c_j1 = 5e-15, c.c_j2 = 6e-15, c.c_g1 = 1e-15, c.c_g2 = 1.2e-15, c.c_m = 0.3e-15;
  c.c_r1 = 400e-15, c.c_r2 = 350e-15, c.c_01 = 10e-15, c.c_02 = 10e-15;
  const DerivedCouplings d = derive_couplings(c, 10.0, 16.0);
  const double s1 = 5e-15 + 1e-15 + 0.3e-15, s2 = 6e-15 + 1.2e-15 + 0.3e-15;
  const double emx = e * e * 0.3e-15 / (s1 * s2 - 0.3e-15 * 0.3e-15) / h / 1e9;
  EXPECT_NEAR(d.e_mx / emx, 1.0, 1e-12);
  EXPECT_NEAR(d.crosstalk_ratio[0], 0.3e-15 / s2, 1e-12);
  EXPECT_NEAR(d.crosstalk_ratio[1], 0.3e-15 / s1, 1e-12);
  EXPECT_GT(d.g1, 0.0);
  EXPECT_TRUE(d.regime_ok);
  EXPECT_TRUE(d.warnings.empty());

  CapacitanceSet loose = c;
  loose.c_m = 2e-15;
  const DerivedCouplings w = derive_couplings(loose, 10.0, 16.0);
  EXPECT_FALSE(w.regime_ok);
  EXPECT_FALSE(w.warnings.empty());

  loose.c_01 = 0.0;
  EXPECT_THROW(derive_couplings(loose, 10.0, 16.0), std::invalid_argument);
}

TEST(EnergySweep, SinglePointEqualsDirectCall) {
  const CircuitParams p = fwm::testing::ck_params();
  const EnergySweep s = energy_sweep(p, 0.25, 0.25, 1);
  ASSERT_EQ(s.rows.size(), 1u);
  CircuitParams q = p;
  q.b0 = 0.25;
  EXPECT_EQ(s.rows[0].energies, eigensystem(q).energies());
  EXPECT_THROW(energy_sweep(p, 0.0, 1.0, 0), std::invalid_argument);
}

TEST(EnergySweep, CrossingsBracketSignChangesOfBruteForceGaps) {
  const CircuitParams p = fwm::testing::ck_params();
  const EnergySweep s = energy_sweep(p, -2.0, 2.0, 401);
  ASSERT_EQ(s.rows.size(), 401u);
  ASSERT_FALSE(s.crossings.empty());
  for (const auto& x : s.crossings) {
    // The labelled gap changes sign between the bracket ends.
    const int i = x.pair == "a/b" ? 0 : 2;
    CircuitParams lo = p, hi = p;
    lo.b0 = x.b0_low;
    hi.b0 = x.b0_high;
    const auto el = eigensystem(lo).energies(), eh = eigensystem(hi).energies();
    EXPECT_LE((el[i] - el[i + 1]) * (eh[i] - eh[i + 1]), 0.0);
  }
}

TEST(EnergySweep, CsvFormat) {
  const EnergySweep s = energy_sweep(fwm::testing::ck_params(), -1.0, 1.0, 3);
  std::ostringstream os;
  write_sweep_csv(os, s);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "b0,E_a,E_b,E_c,E_d");
  int rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}
