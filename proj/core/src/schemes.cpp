#include "fwm/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fwm/effective.hpp"
#include "fwm/errors.hpp"

namespace fwm {

std::string scheme_key(Scheme s) {
  switch (s) {
    case Scheme::BeamSplitter: return "bm";
    case Scheme::CrossKerr: return "ck";
    case Scheme::TwoModeSqueeze: return "sq2";
    case Scheme::SingleModeSqueeze: return "sq1";
  }
  return "?";
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::BeamSplitter: return "BeamSplitter";
    case Scheme::CrossKerr: return "CrossKerr";
    case Scheme::TwoModeSqueeze: return "TwoModeSqueeze";
    case Scheme::SingleModeSqueeze: return "SingleModeSqueeze";
  }
  return "?";
}

Scheme parse_scheme(const std::string& s) {
  for (Scheme k : kSchemes)
    if (s == scheme_key(k) || s == scheme_name(k)) return k;
  throw std::invalid_argument("unknown scheme '" + s + "' (expected bm, ck, sq2 or sq1)");
}

Level ground_level(Scheme s) {
  return s == Scheme::BeamSplitter || s == Scheme::CrossKerr ? Level::a : Level::b;
}

int required_drives(Scheme s) { return s == Scheme::CrossKerr ? 0 : 2; }

void DriveSpec::validate() const {
  if (target_qubit < 0 || target_qubit > 2) throw std::invalid_argument("drive qubit must be 0, 1 or 2");
  if (!(rabi >= 0.0)) throw std::invalid_argument("drive Rabi frequency must be >= 0");
  if (!(frequency >= 0.0)) throw std::invalid_argument("drive frequency must be >= 0");
}

namespace {

CMatrix term_operator(const FrameTerm& t, const FockCutoffs& c) {
  CMatrix op = build_transition_operator(t.dst, t.src, c).matrix();
  if (t.mode != 0) {
    const auto kind = t.create ? LadderKind::create : LadderKind::annihilate;
    op = op * build_mode_operator(t.mode, kind, c).matrix();
  }
  return op;
}

// Diagonal of a per-level array plus photon energies, on the tensor space.
Eigen::VectorXd level_diagonal(const std::array<double, 4>& per_level, double w1, double w2,
                               const FockCutoffs& c) {
  Eigen::VectorXd d(c.total_dim());
  for (Level q : kLevels)
    for (int n1 = 0; n1 <= c.n_max1; ++n1)
      for (int n2 = 0; n2 <= c.n_max2; ++n2)
        d(c.index(q, n1, n2)) = per_level[index_of(q)] + w1 * n1 + w2 * n2;
  return d;
}

std::string transition_name(Level i, Level j) {
  return std::string{level_name(i), level_name(j)};
}

}  // namespace

CMatrix SchemeFrame::h_i0(const FockCutoffs& c) const {
  return level_diagonal(level_detuning, 0.0, 0.0, c).cast<cplx>().asDiagonal();
}

Hamiltonian SchemeFrame::hamiltonian(const FockCutoffs& c) const {
  Hamiltonian h(h_i0(c));
  for (const auto& t : terms) {
    CMatrix op = t.coefficient * term_operator(t, c);
    const double nu = t.four_photon ? detunings.delta_f : t.frequency;
    if (nu == 0.0)
      h.add_static(op + op.adjoint());
    else
      h.add_term(std::move(op), nu);
  }
  return h;
}

Eigen::VectorXd SchemeFrame::frame_generator(const FockCutoffs& c) const {
  std::array<double, 4> shifted = frame_offset;
  for (double& x : shifted) x += eigen.energy(ground);
  return level_diagonal(shifted, params.omega_a1, params.omega_a2, c);
}

Hamiltonian SchemeFrame::lab_counterpart(const FockCutoffs& c) const {
  std::array<double, 4> lab_levels{};
  for (int q = 0; q < 4; ++q) lab_levels[q] = eigen.energy(ground) + frame_offset[q] + level_detuning[q];
  Hamiltonian h(CMatrix(level_diagonal(lab_levels, params.omega_a1, params.omega_a2, c)
                            .cast<cplx>()
                            .asDiagonal()));
  const std::array<double, 3> photon{0.0, params.omega_a1, params.omega_a2};
  for (const auto& t : terms) {
    double gap = frame_offset[index_of(t.dst)] - frame_offset[index_of(t.src)];
    gap += t.create ? photon[t.mode] : -photon[t.mode];
    const double nu = (t.four_photon ? detunings.delta_f : t.frequency) - gap;
    CMatrix op = t.coefficient * term_operator(t, c);
    if (nu == 0.0)
      h.add_static(op + op.adjoint());
    else
      h.add_term(std::move(op), nu);
  }
  return h;
}

namespace {

std::array<std::pair<Level, Level>, 2> drive_transitions(Scheme s) {
  switch (s) {
    case Scheme::BeamSplitter: return {{{Level::c, Level::a}, {Level::b, Level::a}}};
    case Scheme::TwoModeSqueeze: return {{{Level::a, Level::b}, {Level::d, Level::b}}};
    case Scheme::SingleModeSqueeze: return {{{Level::c, Level::a}, {Level::d, Level::b}}};
    case Scheme::CrossKerr: break;
  }
  return {};
}

int pick_qubit(const TransitionTable& table, int requested, Level i, Level j) {
  if (requested != 0) return requested;
  return std::abs(table.coefficient(1, i, j)) >= std::abs(table.coefficient(2, i, j)) ? 1 : 2;
}

}  // namespace

std::vector<DriveSpec> SchemeFrame::lab_drives() const {
  std::vector<DriveSpec> out;
  if (scheme == Scheme::CrossKerr) return out;
  const auto tr = drive_transitions(scheme);
  for (int k = 0; k < 2; ++k) {
    const int q = pick_qubit(table, 0, tr[k].first, tr[k].second);
    const double coef = table.coefficient(q, tr[k].first, tr[k].second);
    if (coef == 0.0)
      throw std::invalid_argument("drive transition " + transition_name(tr[k].first, tr[k].second) +
                                  " is dark for both qubits");
    out.push_back({q, std::abs(rabi[k] / coef), drive_frequency[k]});
  }
  return out;
}

CVector frame_phases(const Eigen::VectorXd& h0, double t) {
  CVector f(h0.size());
  for (Eigen::Index k = 0; k < h0.size(); ++k) f(k) = std::polar(1.0, -kTwoPi * h0(k) * t);
  return f;
}

StateVector to_frame(const StateVector& lab, const Eigen::VectorXd& h0, double t) {
  if (h0.size() != lab.dim()) throw std::invalid_argument("to_frame: dimension mismatch");
  return StateVector(lab.cutoffs(), frame_phases(h0, t).conjugate().cwiseProduct(lab.amplitudes()));
}

Hamiltonian build_full_hamiltonian(const CircuitParams& p, const std::vector<DriveSpec>& drives,
                                   const FockCutoffs& cutoffs, const FullHamiltonianOptions& opts) {
  p.validate();
  cutoffs.validate();
  const EigenSystem es = eigensystem(p);
  const TransitionTable table = transition_table(es);

  const CMatrix a1 = build_mode_operator(1, LadderKind::annihilate, cutoffs).matrix();
  const CMatrix a2 = build_mode_operator(2, LadderKind::annihilate, cutoffs).matrix();
  const CMatrix q1 = a1 + a1.adjoint();
  const CMatrix q2 = a2 + a2.adjoint();
  const CMatrix x1 = embed_level_matrix(table.matrix(1).cast<cplx>(), cutoffs);
  const CMatrix x2 = embed_level_matrix(table.matrix(2).cast<cplx>(), cutoffs);

  const auto e = es.energies();
  Hamiltonian h(CMatrix(level_diagonal(e, p.omega_a1, p.omega_a2, cutoffs).cast<cplx>().asDiagonal()));
  h.add_static(p.g1 * x1 * q1 + p.g2 * x2 * q2);
  if (opts.include_crosstalk) {
    if (p.g2_1 != 0.0) h.add_static(p.g2_1 * x1 * q2);
    if (p.g2_2 != 0.0) h.add_static(p.g2_2 * x2 * q1);
    if (p.g3 != 0.0) h.add_static(p.g3 * q1 * q2);
  }
  for (const auto& d : drives) {
    d.validate();
    if (d.target_qubit == 0) throw std::invalid_argument("lab drives need an explicit target qubit");
    if (d.rabi == 0.0) continue;
    const CMatrix& x = d.target_qubit == 1 ? x1 : x2;
    if (d.frequency == 0.0)
      h.add_static(2.0 * d.rabi * x);
    else
      h.add_term(d.rabi * x, d.frequency);
  }
  return h;
}

SchemeFrame build_scheme_frame(const CircuitParams& p, Scheme s, const std::vector<DriveSpec>& drives,
                               const FockCutoffs& cutoffs, const DetuningOverrides& ov) {
  p.validate();
  cutoffs.validate();
  if (static_cast<int>(drives.size()) != required_drives(s)) {
    std::ostringstream msg;
    msg << scheme_name(s) << " takes " << required_drives(s) << " drives, got " << drives.size();
    throw std::invalid_argument(msg.str());
  }
  for (const auto& d : drives) d.validate();

  SchemeFrame f;
  f.scheme = s;
  f.ground = ground_level(s);
  f.params = p;
  f.eigen = eigensystem(p);
  f.table = transition_table(f.eigen);
  f.cutoffs = cutoffs;
  const EigenSystem& es = f.eigen;
  const TransitionTable& tb = f.table;
  const double wa1 = p.omega_a1, wa2 = p.omega_a2;
  Detunings& dt = f.detunings;
  auto freq = [&](int k) { return drives[k].frequency; };
  auto idx = [](Level l) { return index_of(l); };
  constexpr Level A = Level::a, B = Level::b, C = Level::c, D = Level::d;

  if (s != Scheme::CrossKerr) f.rabi = {drives[0].rabi, drives[1].rabi};

  switch (s) {
    case Scheme::BeamSplitter: {
      const double w1 = ov.delta1 ? *ov.delta1 + es.gap(C, A) : freq(0);
      const double w2 = ov.delta2 ? *ov.delta2 + es.gap(B, A) : freq(1);
      f.drive_frequency = {w1, w2};
      dt.delta1 = w1 - es.gap(C, A);
      dt.delta2 = w2 - es.gap(B, A);
      dt.delta_derived = w1 + wa1 - es.gap(D, A);
      dt.delta = ov.delta.value_or(dt.delta_derived);
      dt.delta_f_matching = w1 + wa1 - w2 - wa2;
      f.g_eff = {tb.effective_coupling(1, p.g1, D, C), tb.effective_coupling(2, p.g2, D, B)};
      f.level_detuning[idx(B)] = -dt.delta2;
      f.level_detuning[idx(C)] = -dt.delta1;
      f.level_detuning[idx(D)] = -dt.delta;
      f.frame_offset = {0.0, w2, w1, w1 + wa1};
      f.terms = {{C, A, 0, false, f.rabi[0], 0.0, false},
                 {B, A, 0, false, f.rabi[1], 0.0, false},
                 {D, C, 1, false, f.g_eff[0], 0.0, false},
                 {D, B, 2, false, f.g_eff[1], 0.0, true}};
      break;
    }
    case Scheme::CrossKerr: {
      dt.delta1 = ov.delta1.value_or(wa1 - es.gap(B, A));
      dt.delta2 = ov.delta2.value_or(wa2 - es.gap(C, A));
      dt.delta_derived = wa1 + wa2 - es.gap(D, A);
      dt.delta = ov.delta.value_or(dt.delta_derived);
      f.g_eff = {tb.effective_coupling(1, p.g1, D, C), tb.effective_coupling(2, p.g2, D, B)};
      f.level_detuning[idx(B)] = -dt.delta1;
      f.level_detuning[idx(C)] = -dt.delta2;
      f.level_detuning[idx(D)] = -dt.delta;
      f.frame_offset = {0.0, wa1, wa2, wa1 + wa2};
      f.terms = {{D, C, 1, false, tb.effective_coupling(1, p.g1, D, C), 0.0, false},
                 {B, A, 1, false, tb.effective_coupling(1, p.g1, B, A), 0.0, false},
                 {D, B, 2, false, tb.effective_coupling(2, p.g2, D, B), 0.0, false},
                 {C, A, 2, false, tb.effective_coupling(2, p.g2, C, A), 0.0, false}};
      break;
    }
    case Scheme::TwoModeSqueeze: {
      const double w1 = ov.delta1 ? *ov.delta1 + es.gap(A, B) : freq(0);
      const double w2 = ov.delta2 ? *ov.delta2 + es.gap(D, B) : freq(1);
      f.drive_frequency = {w1, w2};
      dt.delta1 = w1 - es.gap(A, B);
      dt.delta2 = w2 - es.gap(D, B);
      dt.delta_derived = w2 - wa1 - es.gap(C, B);
      dt.delta = ov.delta.value_or(dt.delta_derived);
      dt.delta_f_matching = w2 - w1 - wa1 - wa2;
      f.g_eff = {tb.effective_coupling(1, p.g1, D, C), tb.effective_coupling(2, p.g2, C, A)};
      f.level_detuning[idx(A)] = -dt.delta1;
      f.level_detuning[idx(D)] = -dt.delta2;
      f.level_detuning[idx(C)] = -dt.delta;
      f.frame_offset = {w1, 0.0, w2 - wa1, w2};
      // c <- a with a photon absorbed from mode 2, so that its conjugate
      // emits into mode 2 and the loop creates a photon pair.
      f.terms = {{A, B, 0, false, f.rabi[0], 0.0, false},
                 {D, B, 0, false, f.rabi[1], 0.0, false},
                 {D, C, 1, false, f.g_eff[0], 0.0, false},
                 {C, A, 2, false, f.g_eff[1], 0.0, true}};
      break;
    }
    case Scheme::SingleModeSqueeze: {
      const double w2 = ov.delta2 ? *ov.delta2 + es.gap(D, B) : freq(1);
      dt.delta1 = ov.delta1.value_or(wa1 - es.gap(A, B));
      dt.delta2 = w2 - es.gap(D, B);
      dt.delta_derived = w2 - wa1 - es.gap(C, B);
      dt.delta = ov.delta.value_or(dt.delta_derived);
      f.g_eff = {tb.effective_coupling(1, p.g1, D, C), tb.effective_coupling(1, p.g1, A, B)};
      f.level_detuning[idx(A)] = -dt.delta1;
      f.level_detuning[idx(D)] = -dt.delta2;
      f.level_detuning[idx(C)] = -dt.delta;
      f.frame_offset = {wa1, 0.0, w2 - wa1, w2};
      f.drive_frequency = {freq(0), w2};
      f.terms = {{C, A, 0, false, f.rabi[0], 0.0, true},
                 {D, B, 0, false, f.rabi[1], 0.0, false},
                 {D, C, 1, false, f.g_eff[0], 0.0, false},
                 {A, B, 1, false, f.g_eff[1], 0.0, false}};
      break;
    }
  }

  if (s != Scheme::CrossKerr) {
    double balanced = 0.0;
    try {
      const EffectiveParams ep = closed_form(s, dt, f.g_eff, f.rabi);
      balanced = balanced_delta_f(s, ep.delta_eps1, ep.delta_eps2);
    } catch (const SingularityError&) {
      balanced = dt.delta_f_matching;
    }
    if (s == Scheme::SingleModeSqueeze) {
      // omega_1 follows from four-photon matching unless the config gives
      // it in frequency form.
      dt.delta_f = ov.delta_f.value_or(balanced);
      if (freq(0) == 0.0 || !ov.empty())
        f.drive_frequency[0] = f.drive_frequency[1] - 2.0 * wa1 - dt.delta_f;
      dt.delta_f_matching = f.drive_frequency[1] - f.drive_frequency[0] - 2.0 * wa1;
    } else {
      dt.delta_f = ov.delta_f.value_or(balanced);
    }
    for (int k = 0; k < 2; ++k)
      if (!(f.drive_frequency[k] > 0.0)) {
        std::ostringstream msg;
        msg << "drive " << k + 1 << " frequency resolves to " << f.drive_frequency[k]
            << " GHz; give a positive frequency or a detuning";
        throw std::invalid_argument(msg.str());
      }
  }
  return f;
}

DispersiveReport dispersive_check(const SchemeFrame& frame, double nbar1, double nbar2,
                                  double threshold) {
  DispersiveReport rep;
  rep.threshold = threshold;
  const auto& ld = frame.level_detuning;
  const std::array<double, 3> amp{1.0, std::sqrt(std::max(nbar1, 0.0)), std::sqrt(std::max(nbar2, 0.0))};
  auto ratio = [&](double num, double den) {
    if (num == 0.0) return 0.0;
    return den == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(num / den);
  };
  auto label = [&](const FrameTerm& t) {
    std::string who;
    if (t.mode == 0) {
      int k = 0;
      for (const auto& u : frame.terms) {
        if (u.mode == 0) ++k;
        if (&u == &t) break;
      }
      who = "Omega" + std::to_string(k);
    } else {
      who = "g" + std::to_string(t.mode);
    }
    return who + " " + level_name(t.dst) + "<-" + level_name(t.src);
  };
  auto flag = [&](std::vector<DispersiveRatio>& list, std::string name, double v) {
    const bool bad = !(v <= threshold);
    rep.ok = rep.ok && !bad;
    list.push_back({std::move(name), v, bad});
  };

  const int g = index_of(frame.ground);
  for (const auto& t : frame.terms) {
    const double nu = t.four_photon ? frame.detunings.delta_f : t.frequency;
    const double mismatch = ld[index_of(t.dst)] - ld[index_of(t.src)] + nu;
    flag(rep.single_photon, label(t), ratio(t.coefficient * amp[t.mode], mismatch));
  }
  // Two-step paths out of the ground level: first step to m, second to k.
  for (const auto& t1 : frame.terms) {
    int m = -1;
    if (index_of(t1.src) == g) m = index_of(t1.dst);
    else if (index_of(t1.dst) == g) m = index_of(t1.src);
    if (m < 0) continue;
    for (const auto& t2 : frame.terms) {
      if (&t2 == &t1) continue;
      int k = -1;
      if (index_of(t2.src) == m) k = index_of(t2.dst);
      else if (index_of(t2.dst) == m) k = index_of(t2.src);
      if (k < 0 || k == g) continue;
      const double num = t1.coefficient * amp[t1.mode] * t2.coefficient * amp[t2.mode];
      const double den = (ld[m] - ld[g]) * (ld[k] - ld[g]);
      flag(rep.two_photon, label(t1) + " / " + label(t2), ratio(num, den));
    }
  }

  // Transitions reachable by each mode or drive that the frame drops.
  const std::array<std::pair<Level, Level>, 4> all{
      {{Level::a, Level::b}, {Level::d, Level::c}, {Level::d, Level::b}, {Level::a, Level::c}}};
  auto used = [&](int mode, int drive_index, Level i, Level j) {
    int k = 0;
    for (const auto& t : frame.terms) {
      const bool same = (t.dst == i && t.src == j) || (t.dst == j && t.src == i);
      if (t.mode == 0) {
        ++k;
        if (mode == 0 && k == drive_index && same) return true;
      } else if (t.mode == mode && same) {
        return true;
      }
    }
    return false;
  };
  const auto& es = frame.eigen;
  for (int mode = 1; mode <= 2; ++mode) {
    const double w = mode == 1 ? frame.params.omega_a1 : frame.params.omega_a2;
    for (const auto& [i, j] : all) {
      const double c = frame.table.coefficient(mode, i, j);
      if (std::abs(c) < 1e-12 || used(mode, 0, i, j)) continue;
      rep.unwanted.push_back({"mode" + std::to_string(mode), transition_name(i, j), c,
                              w - std::abs(es.gap(i, j))});
    }
  }
  if (frame.scheme != Scheme::CrossKerr) {
    const auto drives = frame.lab_drives();
    for (int k = 0; k < 2; ++k) {
      for (const auto& [i, j] : all) {
        const double c = frame.table.coefficient(drives[k].target_qubit, i, j);
        if (std::abs(c) < 1e-12 || used(0, k + 1, i, j)) continue;
        rep.unwanted.push_back({"drive" + std::to_string(k + 1), transition_name(i, j), c,
                                frame.drive_frequency[k] - std::abs(es.gap(i, j))});
      }
    }
  }
  return rep;
}

}  // namespace fwm
