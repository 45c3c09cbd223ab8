#include "fwm/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <thread>

#include "fwm/dynamics.hpp"
#include "fwm/effective.hpp"
#include "fwm/errors.hpp"
#include "fwm/schemes.hpp"

namespace fwm {

OptimizeSpec default_optimize_spec(const CircuitParams& base, double span) {
  OptimizeSpec s;
  s.base = base;
  s.e_j1 = {base.e_j1 * (1.0 - span), base.e_j1 * (1.0 + span)};
  s.e_j2 = {base.e_j2 * (1.0 - span), base.e_j2 * (1.0 + span)};
  const double db0 = std::abs(base.b0) * span;
  s.b0 = {base.b0 - db0, base.b0 + db0};
  const SchemeFrame ref = build_scheme_frame(base, Scheme::CrossKerr, {}, s.cutoffs);
  const double chi = effective_params(ref).chi;
  if (chi != 0.0) {
    const double t_ref = 0.5 / std::abs(chi);
    s.gate_time_ns = {s.time_scale.lo * t_ref, s.time_scale.hi * t_ref};
  }
  return s;
}

namespace {

CircuitParams with_point(const CircuitParams& base, const std::array<double, 3>& x) {
  CircuitParams p = base;
  p.e_j1 = x[0];
  p.e_j2 = x[1];
  p.b0 = x[2];
  return p;
}

// Computational-block amplitudes of the full-Hamiltonian state, in the
// cross-Kerr frame, as a function of time.
class BlockEvolution {
 public:
  BlockEvolution(const CircuitParams& p, const FockCutoffs& c)
      : frame_(build_scheme_frame(p, Scheme::CrossKerr, {}, c)),
        prop_(build_full_hamiltonian(p, {}, c).at(0.0)) {
    const Level g = frame_.ground;
    const CVector psi0 = initial_state(g, c).amplitudes();
    c0_ = prop_.vectors().adjoint() * psi0;
    const Eigen::VectorXd h0 = frame_.frame_generator(c);
    const std::array<std::array<int, 2>, 4> lab{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
    for (int k = 0; k < 4; ++k) {
      rows_[k] = c.index(g, lab[k][0], lab[k][1]);
      h0_[k] = h0(rows_[k]);
    }
  }

  const SchemeFrame& frame() const { return frame_; }

  double fidelity(double t) const {
    const auto& w = prop_.energies();
    CVector ph(w.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) ph(j) = std::polar(1.0, -kTwoPi * w(j) * t) * c0_(j);
    std::array<cplx, 4> amps{};
    for (int k = 0; k < 4; ++k)
      amps[k] = std::polar(1.0, kTwoPi * h0_[k] * t) * (prop_.vectors().row(rows_[k]) * ph)(0);
    return cz_fidelity(amps).fidelity;
  }

 private:
  SchemeFrame frame_;
  StaticPropagator prop_;
  CVector c0_;
  std::array<int, 4> rows_{};
  std::array<double, 4> h0_{};
};

}  // namespace

double cz_fidelity_at(const CircuitParams& p, double t, const FockCutoffs& cutoffs) {
  const SchemeFrame frame = build_scheme_frame(p, Scheme::CrossKerr, {}, cutoffs);
  const Hamiltonian h = build_full_hamiltonian(p, {}, cutoffs);
  PropagationOptions o;
  o.method = PropagationMethod::spectral;
  o.samples = 2;
  o.frame = frame.frame_generator();
  const Trajectory tr = propagate(h, initial_state(frame.ground, cutoffs), t, {}, o);
  return cz_fidelity(tr.final_state, frame.ground).fidelity;
}

Evaluation evaluate_point(const OptimizeSpec& spec, const std::array<double, 3>& x) {
  Evaluation ev;
  ev.params = x;
  try {
    const BlockEvolution evo(with_point(spec.base, x), spec.cutoffs);
    const double chi = effective_params(evo.frame()).chi;
    if (chi == 0.0 || !std::isfinite(chi)) return ev;
    const double t_ref = 0.5 / std::abs(chi);
    const double lo = std::max(spec.time_scale.lo * t_ref, spec.gate_time_ns.lo);
    const double hi = std::min(spec.time_scale.hi * t_ref, spec.gate_time_ns.hi);
    if (!(lo < hi)) return ev;
    const int n = std::max(3, spec.time_samples);
    const double h = (hi - lo) / (n - 1);
    int best = 0;
    double best_f = -1.0;
    for (int k = 0; k < n; ++k) {
      const double f = evo.fidelity(lo + k * h);
      if (f > best_f) best_f = f, best = k;
    }
    double a = lo + std::max(best - 1, 0) * h, b = lo + std::min(best + 1, n - 1) * h;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = evo.fidelity(x1), f2 = evo.fidelity(x2);
    for (int it = 0; it < 80 && b - a > 1e-9; ++it) {
      if (f1 > f2) {
        b = x2, x2 = x1, f2 = f1;
        x1 = b - invphi * (b - a);
        f1 = evo.fidelity(x1);
      } else {
        a = x1, x1 = x2, f1 = f2;
        x2 = a + invphi * (b - a);
        f2 = evo.fidelity(x2);
      }
    }
    const double tm = 0.5 * (a + b);
    const double fm = evo.fidelity(tm);
    ev.ok = true;
    if (fm >= best_f) {
      ev.fidelity = fm;
      ev.gate_time = tm;
    } else {
      ev.fidelity = best_f;
      ev.gate_time = lo + best * h;
    }
  } catch (const NumericError&) {
    ev.ok = false;
  }
  return ev;
}

namespace {

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

bool better(const Evaluation& x, const Evaluation& y) {
  if (x.ok != y.ok) return x.ok;
  if (x.fidelity != y.fidelity) return x.fidelity > y.fidelity;
  return x.params < y.params;
}

std::vector<Evaluation> evaluate_all(const OptimizeSpec& spec, const std::vector<std::array<double, 3>>& pts) {
  std::vector<Evaluation> out(pts.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16u));
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < pts.size(); i += workers) out[i] = evaluate_point(spec, pts[i]);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

}  // namespace

OptimizationResult maximize_fidelity(const OptimizeSpec& spec) {
  if (spec.budget < 1) throw std::invalid_argument("optimization budget must be >= 1");
  const std::array<double, 3> center{spec.base.e_j1, spec.base.e_j2, spec.base.b0};
  const std::array<Interval, 3> box{spec.e_j1, spec.e_j2, spec.b0};
  for (int d = 0; d < 3; ++d) {
    if (!(box[d].lo <= box[d].hi)) throw std::invalid_argument("optimization bounds are inverted");
    if (!box[d].contains(center[d])) throw std::invalid_argument("optimization bounds must contain the reference point");
  }
  if (!(spec.time_scale.lo > 0.0 && spec.time_scale.lo < spec.time_scale.hi))
    throw std::invalid_argument("gate-time window must satisfy 0 < lo < hi");

  OptimizationResult res;
  res.e_mx = spec.base.e_mx;
  std::mt19937_64 rng(spec.seed);

  // Coarse stage: the reference point, a jittered grid, then random fill.
  int n_grid = std::max(1, static_cast<int>(spec.budget * spec.grid_fraction));
  // Nelder-Mead needs four evaluations to start; smaller remainders go to the coarse stage.
  if (spec.budget - n_grid < 4) n_grid = spec.budget;
  std::vector<std::array<double, 3>> pts{center};
  const int m = static_cast<int>(std::floor(std::cbrt(std::max(0, n_grid - 1)) + 1e-9));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const std::array<int, 3> cell{i, j, k};
        std::array<double, 3> x{};
        for (int d = 0; d < 3; ++d) {
          const double u = (cell[d] + 0.5 + 0.5 * (uniform01(rng) - 0.5)) / m;
          x[d] = box[d].lo + u * (box[d].hi - box[d].lo);
        }
        pts.push_back(x);
      }
  while (static_cast<int>(pts.size()) < n_grid) {
    std::array<double, 3> x{};
    for (int d = 0; d < 3; ++d) x[d] = box[d].lo + uniform01(rng) * (box[d].hi - box[d].lo);
    pts.push_back(x);
  }
  pts.resize(std::min<std::size_t>(pts.size(), spec.budget));
  res.history = evaluate_all(spec, pts);

  // Local stage: Nelder-Mead on -fidelity with bound clamping.
  int left = spec.budget - static_cast<int>(res.history.size());
  auto eval = [&](std::array<double, 3> x) {
    for (int d = 0; d < 3; ++d) x[d] = box[d].clamp(x[d]);
    Evaluation e = evaluate_point(spec, x);
    res.history.push_back(e);
    --left;
    return e;
  };
  auto cost = [](const Evaluation& e) { return e.ok ? -e.fidelity : std::numeric_limits<double>::infinity(); };

  if (left >= 4) {
    Evaluation start = res.history.front();
    for (const auto& e : res.history)
      if (better(e, start)) start = e;
    std::array<Evaluation, 4> simplex{};
    simplex[0] = start;
    for (int d = 0; d < 3; ++d) {
      std::array<double, 3> x = start.params;
      const double step = 0.05 * (box[d].hi - box[d].lo);
      x[d] = x[d] + step <= box[d].hi ? x[d] + step : x[d] - step;
      simplex[d + 1] = eval(x);
    }
    auto order = [&] {
      std::sort(simplex.begin(), simplex.end(), [&](const Evaluation& a, const Evaluation& b) {
        if (cost(a) != cost(b)) return cost(a) < cost(b);
        return a.params < b.params;
      });
    };
    while (left > 0) {
      order();
      double size = 0.0;
      for (int v = 1; v < 4; ++v)
        for (int d = 0; d < 3; ++d)
          size = std::max(size, std::abs(simplex[v].params[d] - simplex[0].params[d]) /
                                    std::max(1e-300, box[d].hi - box[d].lo));
      if (size < 1e-7 && std::abs(cost(simplex[3]) - cost(simplex[0])) < 1e-12) break;

      std::array<double, 3> c{};
      for (int v = 0; v < 3; ++v)
        for (int d = 0; d < 3; ++d) c[d] += simplex[v].params[d] / 3.0;
      auto along = [&](double t) {
        std::array<double, 3> x{};
        for (int d = 0; d < 3; ++d) x[d] = c[d] + t * (simplex[3].params[d] - c[d]);
        return x;
      };
      const Evaluation r = eval(along(-1.0));
      if (cost(r) < cost(simplex[0])) {
        if (left <= 0) { simplex[3] = r; break; }
        const Evaluation e = eval(along(-2.0));
        simplex[3] = cost(e) < cost(r) ? e : r;
      } else if (cost(r) < cost(simplex[2])) {
        simplex[3] = r;
      } else {
        if (left <= 0) break;
        const bool outside = cost(r) < cost(simplex[3]);
        const Evaluation k = eval(along(outside ? -0.5 : 0.5));
        if (cost(k) < std::min(cost(r), cost(simplex[3]))) {
          simplex[3] = k;
        } else {
          for (int v = 1; v < 4 && left > 0; ++v) {
            std::array<double, 3> x{};
            for (int d = 0; d < 3; ++d)
              x[d] = simplex[0].params[d] + 0.5 * (simplex[v].params[d] - simplex[0].params[d]);
            simplex[v] = eval(x);
          }
        }
      }
    }
  }

  res.evaluations = static_cast<int>(res.history.size());
  const Evaluation* best = &res.history.front();
  for (const auto& e : res.history)
    if (better(e, *best)) best = &e;
  if (!best->ok) throw OptimizationError("no fidelity evaluation succeeded");
  res.best_params = best->params;
  res.best_gate_time = best->gate_time;
  res.fidelity = best->fidelity;
  return res;
}

std::vector<EmxSweepRow> sweep_emx(const OptimizeSpec& spec, const std::vector<double>& values) {
  std::vector<EmxSweepRow> rows;
  for (double v : values) {
    OptimizeSpec s = spec;
    s.base.e_mx = v;
    rows.push_back({v, maximize_fidelity(s)});
  }
  return rows;
}

void write_emx_csv(std::ostream& os, const std::vector<EmxSweepRow>& rows) {
  os << "emx_GHz,fidelity,gate_time_ns,EJ1,EJ2,b0\n" << std::setprecision(12);
  for (const auto& r : rows)
    os << r.e_mx << ',' << r.result.fidelity << ',' << r.result.best_gate_time << ','
       << r.result.best_params[0] << ',' << r.result.best_params[1] << ',' << r.result.best_params[2] << '\n';
}

}  // namespace fwm
