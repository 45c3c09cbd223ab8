#include "fwm/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fwm/errors.hpp"

namespace fwm {

namespace {

constexpr double kElementaryCharge = 1.602176634e-19;  // C
constexpr double kPlanck = 6.62607015e-34;             // J s
constexpr double kHbar = kPlanck / kTwoPi;

double joules_to_ghz(double e) { return e / kPlanck * 1e-9; }

}  // namespace

void CapacitanceSet::validate() const {
  for (double c : {c_j1, c_j2, c_g1, c_g2, c_m, c_r1, c_r2, c_01, c_02})
    if (!(c > 0.0)) throw std::invalid_argument("all capacitances must be > 0");
}

bool CapacitanceSet::in_regime(double ratio) const {
  return sigma_r1() >= ratio * sigma1() && sigma_r2() >= ratio * sigma2() &&
         sigma1() >= ratio * c_m && sigma2() >= ratio * c_m;
}

void CircuitParams::validate() const {
  if (e_mx < 0.0) throw std::invalid_argument("E_mx must be >= 0");
  if (g1 < 0.0 || g2 < 0.0) throw std::invalid_argument("couplings g_i must be >= 0");
  if (!(omega_a1 > 0.0) || !(omega_a2 > 0.0))
    throw std::invalid_argument("resonator frequencies must be > 0");
}

DerivedCouplings derive_couplings(const CapacitanceSet& caps, double omega_a1, double omega_a2,
                                  double regime_ratio) {
  caps.validate();
  if (!(omega_a1 > 0.0) || !(omega_a2 > 0.0))
    throw std::invalid_argument("resonator frequencies must be > 0");

  const double s1 = caps.sigma1(), s2 = caps.sigma2();
  const double det = s1 * s2 - caps.c_m * caps.c_m;
  const double e2 = kElementaryCharge * kElementaryCharge;

  DerivedCouplings out;
  out.e_mx = joules_to_ghz(caps.c_m * e2 / det);

  const std::array<double, 2> cg{caps.c_g1, caps.c_g2};
  const std::array<double, 2> sigma_bar{s2, s1};
  const std::array<double, 2> sigma_r{caps.sigma_r1(), caps.sigma_r2()};
  const std::array<double, 2> hw{kHbar * kTwoPi * omega_a1 * 1e9, kHbar * kTwoPi * omega_a2 * 1e9};

  std::array<double, 2> g{}, g2{};
  for (int i = 0; i < 2; ++i) {
    const double field = std::sqrt(e2 / (2.0 * sigma_r[i]) * hw[i]);
    g[i] = joules_to_ghz(cg[i] * sigma_bar[i] / det * field);
    g2[i] = joules_to_ghz(cg[i] * caps.c_m / det * field);
  }
  out.g1 = g[0];
  out.g2 = g[1];
  out.g2_1 = g2[0];
  out.g2_2 = g2[1];
  out.g3 = joules_to_ghz(std::sqrt(caps.c_g1 * caps.c_g2) * caps.c_m / det *
                         std::sqrt(caps.c_g1 * caps.c_g2 / (4.0 * sigma_r[0] * sigma_r[1])) *
                         std::sqrt(hw[0] * hw[1]));
  for (int i = 0; i < 2; ++i) {
    out.crosstalk_ratio[i] = g[i] > 0.0 ? g2[i] / g[i] : 0.0;
    out.resonator_crosstalk_ratio[i] = g[i] > 0.0 ? out.g3 / g[i] : 0.0;
  }

  out.regime_ok = caps.in_regime(regime_ratio);
  if (!out.regime_ok) {
    std::ostringstream msg;
    msg << "capacitances violate C_sigma_r >> C_sigma >> C_m at ratio " << regime_ratio
        << "; the E_mx closed form is unreliable";
    out.warnings.push_back(msg.str());
  }
  return out;
}

double EigenSystem::energy(Level l) const {
  switch (l) {
    case Level::a: return e_a;
    case Level::b: return e_b;
    case Level::c: return e_c;
    case Level::d: return e_d;
  }
  return 0.0;
}

std::array<double, 4> EigenSystem::eigenvector(Level l) const {
  const double sp = std::sin(theta_plus), cp = std::cos(theta_plus);
  const double sm = std::sin(theta_minus), cm = std::cos(theta_minus);
  switch (l) {
    case Level::a: return {-sp, 0.0, 0.0, cp};
    case Level::b: return {0.0, cm, -sm, 0.0};
    case Level::c: return {0.0, sm, cm, 0.0};
    case Level::d: return {cp, 0.0, 0.0, sp};
  }
  return {};
}

Eigen::Matrix4d EigenSystem::basis_change() const {
  Eigen::Matrix4d v;
  for (Level l : kLevels) {
    const auto col = eigenvector(l);
    for (int r = 0; r < 4; ++r) v(r, index_of(l)) = col[r];
  }
  return v;
}

EigenSystem eigensystem(const CircuitParams& p) {
  p.validate();
  const double sum = p.e_j1 + p.e_j2;
  const double diff = p.e_j1 - p.e_j2;
  const double vp = p.e_mx * (1.0 - p.b0);  // <00|H_int|11>
  const double vm = p.e_mx * (1.0 + p.b0);  // <01|H_int|10>

  EigenSystem es;
  es.e_s_plus = std::sqrt(sum * sum + 4.0 * vp * vp);
  es.e_s_minus = std::sqrt(diff * diff + 4.0 * vm * vm);
  if (es.e_s_plus < kDegeneracyThreshold)
    throw DegeneracyError("E_s+ vanishes: levels a and d are degenerate, theta_+ undefined");
  if (es.e_s_minus < kDegeneracyThreshold)
    throw DegeneracyError("E_s- vanishes: levels b and c are degenerate, theta_- undefined");

  const double shift = p.e_mx * p.b0;
  es.e_a = shift - es.e_s_plus / 2.0;
  es.e_b = -shift - es.e_s_minus / 2.0;
  es.e_c = -shift + es.e_s_minus / 2.0;
  es.e_d = shift + es.e_s_plus / 2.0;

  // The sine takes the principal root; the cosine carries the sign of the
  // block coupling, so theta lies in [0, pi] and the eigenvectors stay
  // correct for b0 > 1 or b0 < -1.
  auto angle = [](double es_, double bias, double coupling) {
    const double s2 = std::clamp((es_ + bias) / (2.0 * es_), 0.0, 1.0);
    const double s = std::sqrt(s2);
    const double c = std::copysign(std::sqrt(1.0 - s2), coupling);
    return std::atan2(s, c);
  };
  es.theta_plus = angle(es.e_s_plus, sum, vp);
  es.theta_minus = angle(es.e_s_minus, -diff, vm);
  return es;
}

Eigen::Matrix4d qubit_hamiltonian(const CircuitParams& p) {
  // Basis |q1 q2> with index 2*q1 + q2; sigma_z = diag(-1, +1).
  Eigen::Matrix2d sx, sz, id;
  sx << 0, 1, 1, 0;
  sz << -1, 0, 0, 1;
  id.setIdentity();
  // sigma_y (x) sigma_y is real: -(|01><10| ...) pattern.
  Eigen::Matrix4d syy;
  syy << 0, 0, 0, -1,
         0, 0, 1, 0,
         0, 1, 0, 0,
        -1, 0, 0, 0;
  auto kron = [](const Eigen::Matrix2d& x, const Eigen::Matrix2d& y) {
    Eigen::Matrix4d out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = x(i, j) * y;
    return out;
  };
  return p.e_j1 / 2.0 * kron(sz, id) + p.e_j2 / 2.0 * kron(id, sz) +
         p.e_mx * (kron(sx, sx) + p.b0 * syy + p.b0 * kron(sz, sz));
}

namespace {

int slot(Level i, Level j) {
  auto is = [&](Level x, Level y) { return (i == x && j == y) || (i == y && j == x); };
  if (is(Level::a, Level::b)) return 0;
  if (is(Level::d, Level::c)) return 1;
  if (is(Level::d, Level::b)) return 2;
  if (is(Level::a, Level::c)) return 3;
  return -1;
}

}  // namespace

double TransitionTable::coefficient(int qubit, Level i, Level j) const {
  if (qubit != 1 && qubit != 2) throw std::invalid_argument("qubit index must be 1 or 2");
  const int k = slot(i, j);
  if (k < 0) return 0.0;  // a<->d, b<->c and diagonal elements vanish
  return qubit == 1 ? x1[k] : x2[k];
}

Eigen::Matrix4d TransitionTable::matrix(int qubit) const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (Level i : kLevels)
    for (Level j : kLevels)
      if (i != j) m(index_of(i), index_of(j)) = coefficient(qubit, i, j);
  return m;
}

TransitionTable transition_table(const EigenSystem& es) {
  const double dm = es.theta_plus - es.theta_minus;
  const double dp = es.theta_plus + es.theta_minus;
  TransitionTable t;
  t.x1 = {std::cos(dm), std::cos(dm), std::sin(dm), -std::sin(dm)};
  t.x2 = {-std::sin(dp), std::sin(dp), std::cos(dp), std::cos(dp)};
  return t;
}

EnergySweep energy_sweep(const CircuitParams& p, double b0_from, double b0_to, int points) {
  if (points < 1) throw std::invalid_argument("energy sweep needs at least 1 point");
  std::vector<double> values(points, b0_from);
  for (int k = 1; k < points; ++k) values[k] = b0_from + (b0_to - b0_from) * k / (points - 1);
  return energy_sweep(p, values);
}

EnergySweep energy_sweep(const CircuitParams& p, const std::vector<double>& b0_values) {
  EnergySweep sweep;
  sweep.rows.reserve(b0_values.size());
  for (double b0 : b0_values) {
    CircuitParams q = p;
    q.b0 = b0;
    sweep.rows.push_back({q.b0, eigensystem(q).energies()});
  }
  auto scan = [&](int i, int j, const char* name) {
    for (std::size_t k = 1; k < sweep.rows.size(); ++k) {
      const double prev = sweep.rows[k - 1].energies[i] - sweep.rows[k - 1].energies[j];
      const double cur = sweep.rows[k].energies[i] - sweep.rows[k].energies[j];
      if ((prev < 0.0 && cur >= 0.0) || (prev > 0.0 && cur <= 0.0))
        sweep.crossings.push_back({name, sweep.rows[k - 1].b0, sweep.rows[k].b0});
    }
  };
  scan(0, 1, "a/b");
  scan(2, 3, "c/d");
  return sweep;
}

void write_sweep_csv(std::ostream& os, const EnergySweep& sweep) {
  os << "b0,E_a,E_b,E_c,E_d\n";
  os << std::setprecision(12);
  for (const auto& row : sweep.rows) {
    os << row.b0;
    for (double e : row.energies) os << ',' << e;
    os << '\n';
  }
}

}  // namespace fwm
