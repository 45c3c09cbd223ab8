#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "fwm/effective.hpp"
#include "fwm/errors.hpp"
#include "fwm/optimize.hpp"

namespace fwm::cli {

using nlohmann::json;

namespace fs = std::filesystem;

std::string format_frequency(double ghz) {
  char buf[64];
  if (std::abs(ghz) < 0.1) std::snprintf(buf, sizeof buf, "%.4g MHz", ghz * 1e3);
  else std::snprintf(buf, sizeof buf, "%.5g GHz", ghz);
  return buf;
}

std::string csv_header_line(const RunConfig& cfg) {
  return std::string("# ") + kToolName + " " + tool_version() + " config_hash=" + config_hash(cfg);
}

namespace {

// Infinite or NaN values become null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json stamped(const RunConfig& cfg) {
  return json{{"tool", kToolName}, {"tool_version", tool_version()}, {"config_hash", config_hash(cfg)}};
}

fs::path output_path(const RunConfig& cfg, const std::string& name) {
  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("/outputs/dir", "cannot create '" + cfg.out_dir + "': " + ec.message());
  return dir / name;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("/outputs/dir", "cannot write '" + path.string() + "'");
  return os;
}

void write_json(const RunConfig& cfg, const std::string& name, const json& doc, std::ostream& out) {
  const fs::path path = output_path(cfg, name);
  auto os = open_output(path);
  os << doc.dump(2) << '\n';
  out << "wrote " << path.string() << '\n';
}

json ratios_json(const std::vector<DispersiveRatio>& rs) {
  json a = json::array();
  for (const auto& r : rs) a.push_back({{"name", r.name}, {"value", r.value}, {"flagged", r.flagged}});
  return a;
}

json dispersive_json(const DispersiveReport& rep) {
  json unwanted = json::array();
  for (const auto& u : rep.unwanted)
    unwanted.push_back({{"source", u.source},
                        {"transition", u.transition},
                        {"coefficient", u.coefficient},
                        {"detuning_GHz", u.detuning}});
  return {{"ok", rep.ok},
          {"threshold", rep.threshold},
          {"single_photon", ratios_json(rep.single_photon)},
          {"two_photon", ratios_json(rep.two_photon)},
          {"unwanted", unwanted}};
}

std::vector<double> sweep_values(const SweepConfig& s) {
  if (!s.values.empty()) return s.values;
  std::vector<double> v(s.points, s.from);
  for (int k = 1; k < s.points; ++k) v[k] = s.from + (s.to - s.from) * k / (s.points - 1);
  return v;
}

OptimizeSpec optimize_spec(const RunConfig& cfg) {
  OptimizeSpec spec = default_optimize_spec(cfg.circuit, cfg.optimize.span);
  // The absolute window follows the configured time scale at the reference point.
  if (std::isfinite(spec.gate_time_ns.hi)) {
    const double t_ref = spec.gate_time_ns.lo / spec.time_scale.lo;
    spec.gate_time_ns = {cfg.optimize.time_lo * t_ref, cfg.optimize.time_hi * t_ref};
  }
  spec.time_scale = {cfg.optimize.time_lo, cfg.optimize.time_hi};
  spec.budget = cfg.optimize.budget;
  spec.seed = cfg.optimize.seed;
  spec.cutoffs = cfg.cutoffs;
  return spec;
}

json params_json(const std::array<double, 3>& x) { return {{"E_J1", x[0]}, {"E_J2", x[1]}, {"b0", x[2]}}; }

}  // namespace

SchemeFrame make_frame(const RunConfig& cfg) {
  const int need = required_drives(cfg.scheme);
  if (static_cast<int>(cfg.drives.size()) != need)
    throw ConfigError("/drives", scheme_name(cfg.scheme) + " takes " + std::to_string(need) + " drives, got " +
                                     std::to_string(cfg.drives.size()));
  return build_scheme_frame(cfg.circuit, cfg.scheme, cfg.drives, cfg.cutoffs, cfg.detunings);
}

json derive_report(const RunConfig& cfg) {
  const SchemeFrame frame = make_frame(cfg);
  const EffectiveParams ep = effective_params(frame);
  const DispersiveReport rep =
      dispersive_check(frame, cfg.dispersive.nbar1, cfg.dispersive.nbar2, cfg.dispersive.threshold);
  const Detunings& d = frame.detunings;

  json doc = stamped(cfg);
  doc["config"] = to_json(cfg);
  doc["scheme"] = scheme_key(cfg.scheme);
  doc["effective"] = {{"chi_GHz", ep.chi},
                      {"delta_eps1_GHz", ep.delta_eps1},
                      {"delta_eps2_GHz", ep.delta_eps2},
                      {"delta_f_GHz", ep.delta_f},
                      {"gate_time_ns", finite_or_null(ep.gate_time)}};
  doc["detunings"] = {{"delta1_GHz", d.delta1},
                      {"delta2_GHz", d.delta2},
                      {"delta_GHz", d.delta},
                      {"delta_f_GHz", d.delta_f},
                      {"delta_derived_GHz", d.delta_derived},
                      {"delta_f_matching_GHz", d.delta_f_matching}};
  doc["effective_couplings_GHz"] = frame.g_eff;
  if (required_drives(cfg.scheme) > 0) {
    doc["rabi_GHz"] = frame.rabi;
    doc["drive_frequencies_GHz"] = frame.drive_frequency;
  }
  doc["eigen_energies_GHz"] = frame.eigen.energies();
  if (cfg.capacitances) {
    const auto& p = cfg.circuit;
    doc["derived_couplings"] = {{"E_mx_GHz", p.e_mx}, {"g1_GHz", p.g1},   {"g2_GHz", p.g2},
                                {"g2_1_GHz", p.g2_1}, {"g2_2_GHz", p.g2_2}, {"g3_GHz", p.g3}};
  }
  doc["dispersive"] = dispersive_json(rep);
  return doc;
}

void cmd_derive(const RunConfig& cfg, std::ostream& out) {
  const json doc = derive_report(cfg);
  const auto& e = doc["effective"];
  const auto& d = doc["detunings"];
  out << "scheme      " << scheme_name(cfg.scheme) << " (" << scheme_key(cfg.scheme) << ")\n";
  out << "chi         " << format_frequency(e["chi_GHz"].get<double>()) << '\n';
  out << "delta_eps1  " << format_frequency(e["delta_eps1_GHz"].get<double>()) << '\n';
  out << "delta_eps2  " << format_frequency(e["delta_eps2_GHz"].get<double>()) << '\n';
  out << "Delta_F     " << format_frequency(e["delta_f_GHz"].get<double>()) << '\n';
  if (e["gate_time_ns"].is_null()) out << "gate time   inf (chi = 0)\n";
  else out << "gate time   " << std::setprecision(5) << e["gate_time_ns"].get<double>() << " ns\n";
  out << "Delta1      " << format_frequency(d["delta1_GHz"].get<double>()) << '\n';
  out << "Delta2      " << format_frequency(d["delta2_GHz"].get<double>()) << '\n';
  out << "delta       " << format_frequency(d["delta_GHz"].get<double>()) << '\n';
  if (doc.contains("drive_frequencies_GHz"))
    out << "drives      " << format_frequency(doc["drive_frequencies_GHz"][0].get<double>()) << ", "
        << format_frequency(doc["drive_frequencies_GHz"][1].get<double>()) << '\n';

  const auto& disp = doc["dispersive"];
  out << "dispersive  " << (disp["ok"].get<bool>() ? "ok" : "FLAGGED") << " (threshold "
      << disp["threshold"].get<double>() << ")\n";
  for (const char* group : {"single_photon", "two_photon"})
    for (const auto& r : disp[group])
      if (r["flagged"].get<bool>())
        out << "  " << r["name"].get<std::string>() << " = " << r["value"].get<double>() << '\n';
  for (const auto& u : disp["unwanted"])
    out << "  unwanted " << u["source"].get<std::string>() << " on " << u["transition"].get<std::string>()
        << ": detuning " << format_frequency(u["detuning_GHz"].get<double>()) << '\n';

  write_json(cfg, "derive.json", doc, out);
}

RunSetup run_setup(const SchemeFrame& frame, const EffectiveParams& ep) {
  const FockCutoffs& c = frame.cutoffs;
  const Level g = frame.ground;
  RunSetup s;
  switch (frame.scheme) {
    case Scheme::CrossKerr: {
      s.initial = initial_state(g, c);
      const double tg = std::isfinite(ep.gate_time) ? ep.gate_time : 0.0;
      s.refs = {{"target", target_state(ep, tg, g, c)},
                {"initial", s.initial},
                {"g00", StateVector::basis(c, g, 0, 0)},
                {"g11", StateVector::basis(c, g, 1, 1)}};
      s.target = 0;
      break;
    }
    case Scheme::BeamSplitter:
      s.initial = StateVector::basis(c, g, 1, 0);
      s.refs = {{"initial", s.initial}, {"g01", StateVector::basis(c, g, 0, 1)}};
      s.target = 1;
      break;
    case Scheme::TwoModeSqueeze:
      s.initial = StateVector::basis(c, g, 0, 0);
      s.refs = {{"initial", s.initial}, {"g11", StateVector::basis(c, g, 1, 1)}};
      break;
    case Scheme::SingleModeSqueeze:
      if (c.n_max1 < 2) throw ConfigError("/cutoffs/n_max1", "single-mode squeeze runs need n_max1 >= 2");
      s.initial = StateVector::basis(c, g, 0, 0);
      s.refs = {{"initial", s.initial}, {"g20", StateVector::basis(c, g, 2, 0)}};
      break;
  }
  return s;
}

void cmd_run(const RunConfig& cfg, std::ostream& out) {
  const SchemeFrame frame = make_frame(cfg);
  const EffectiveParams ep = effective_params(frame);
  const double duration = cfg.simulation.duration_ns.value_or(ep.gate_time);
  if (!std::isfinite(duration))
    throw ConfigError("/simulation/duration_ns", "required when the effective coupling vanishes");
  const RunSetup setup = run_setup(frame, ep);

  PropagationOptions opts;
  opts.samples = cfg.simulation.samples;
  opts.max_step = cfg.simulation.max_step_ns;
  opts.convergence_tol = cfg.simulation.convergence_tol;
  const bool lab = cfg.simulation.frame == FrameChoice::lab;
  Hamiltonian h;
  if (lab) {
    h = build_full_hamiltonian(cfg.circuit, frame.lab_drives(), cfg.cutoffs);
    opts.frame = frame.frame_generator();
  } else {
    h = frame.hamiltonian();
  }
  std::vector<StateVector> refs;
  for (const auto& r : setup.refs) refs.push_back(r.state);
  const Trajectory tr = propagate(h, setup.initial, duration, refs, opts);

  {
    const fs::path path = output_path(cfg, "trajectory.csv");
    auto os = open_output(path);
    os << csv_header_line(cfg) << '\n' << "t_ns";
    for (const auto& r : setup.refs) os << ",re_" << r.name << ",im_" << r.name;
    os << ",norm\n" << std::setprecision(12);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      os << tr.times[i];
      for (const auto& ov : tr.overlaps) os << ',' << ov[i].real() << ',' << ov[i].imag();
      os << ',' << tr.norms[i] << '\n';
    }
    out << "wrote " << path.string() << '\n';
  }

  // With opts.frame set the recorded states are already in the scheme frame.
  const StateVector& final_frame = tr.final_state;

  json summary = stamped(cfg);
  summary["scheme"] = scheme_key(cfg.scheme);
  summary["frame"] = lab ? "lab" : "interaction";
  summary["duration_ns"] = duration;
  summary["gate_time_ns"] = finite_or_null(ep.gate_time);
  summary["samples"] = tr.times.size();
  summary["leakage"] = leakage(final_frame, frame.ground);
  summary["norm_drift"] = tr.norm_drift;
  summary["step_ns"] = tr.step;
  summary["halvings"] = tr.halvings;
  json finals = json::object();
  for (std::size_t k = 0; k < setup.refs.size(); ++k) finals[setup.refs[k].name] = std::abs(tr.overlaps[k].back());
  summary["final_overlaps"] = finals;
  summary["fidelity"] = nullptr;
  if (setup.target >= 0) {
    const auto& trace = tr.overlaps[setup.target];
    std::size_t peak = 0;
    for (std::size_t i = 1; i < trace.size(); ++i)
      if (std::abs(trace[i]) > std::abs(trace[peak])) peak = i;
    summary["fidelity"] = std::norm(trace.back());
    summary["target"] = setup.refs[setup.target].name;
    summary["max_target_overlap"] = std::abs(trace[peak]);
    summary["t_max_target_ns"] = tr.times[peak];
  }
  if (cfg.scheme == Scheme::CrossKerr) summary["cz_fidelity"] = cz_fidelity(final_frame, frame.ground).fidelity;
  write_json(cfg, "run_summary.json", summary, out);

  out << "duration    " << std::setprecision(6) << duration << " ns (" << summary["frame"].get<std::string>()
      << " frame)\n";
  for (const auto& [name, v] : finals.items()) out << "  |<" << name << "|psi>| = " << v.get<double>() << '\n';
  if (setup.target >= 0) out << "fidelity    " << summary["fidelity"].get<double>() << '\n';
  if (summary.contains("cz_fidelity")) out << "CZ fidelity " << summary["cz_fidelity"].get<double>() << " (local phases free)\n";
  out << "leakage     " << summary["leakage"].get<double>() << '\n';
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const std::vector<double> values = sweep_values(cfg.sweep);
  if (cfg.sweep.variable == "b0") {
    const EnergySweep sweep = energy_sweep(cfg.circuit, values);
    const fs::path path = output_path(cfg, "sweep_b0.csv");
    auto os = open_output(path);
    os << csv_header_line(cfg) << '\n';
    write_sweep_csv(os, sweep);
    out << "b0 sweep: " << sweep.rows.size() << " points, " << sweep.crossings.size() << " level crossings\n";
    for (const auto& x : sweep.crossings)
      out << "  " << x.pair << " crossing in b0 = [" << x.b0_low << ", " << x.b0_high << "]\n";
    out << "wrote " << path.string() << '\n';
    return;
  }
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!(values[i] > 0.0)) throw ConfigError("/sweep/values/" + std::to_string(i), "E_mx must be > 0");
  const std::vector<EmxSweepRow> rows = sweep_emx(optimize_spec(cfg), values);
  const fs::path path = output_path(cfg, "sweep_emx.csv");
  auto os = open_output(path);
  os << csv_header_line(cfg) << '\n';
  write_emx_csv(os, rows);
  for (const auto& r : rows)
    out << "E_mx " << format_frequency(r.e_mx) << "  fidelity " << std::setprecision(6) << r.result.fidelity
        << "  gate " << r.result.best_gate_time << " ns\n";
  out << "wrote " << path.string() << '\n';
}

void cmd_optimize(const RunConfig& cfg, std::ostream& out) {
  const OptimizeSpec spec = optimize_spec(cfg);
  const OptimizationResult r = maximize_fidelity(spec);

  json doc = stamped(cfg);
  doc["E_mx_GHz"] = r.e_mx;
  doc["best_params"] = params_json(r.best_params);
  doc["best_gate_time_ns"] = r.best_gate_time;
  doc["fidelity"] = r.fidelity;
  doc["evaluations"] = r.evaluations;
  doc["bounds"] = {{"E_J1", {spec.e_j1.lo, spec.e_j1.hi}},
                   {"E_J2", {spec.e_j2.lo, spec.e_j2.hi}},
                   {"b0", {spec.b0.lo, spec.b0.hi}},
                   {"gate_time_ns", {spec.gate_time_ns.lo, finite_or_null(spec.gate_time_ns.hi)}}};
  json history = json::array();
  for (const auto& e : r.history) {
    json row = params_json(e.params);
    row["fidelity"] = e.fidelity;
    row["gate_time_ns"] = e.gate_time;
    row["ok"] = e.ok;
    history.push_back(row);
  }
  doc["history"] = history;

  out << "fidelity    " << std::setprecision(6) << r.fidelity << " after " << r.evaluations << " evaluations\n";
  out << "gate time   " << r.best_gate_time << " ns\n";
  out << "E_J1 " << r.best_params[0] << "  E_J2 " << r.best_params[1] << "  b0 " << r.best_params[2] << '\n';
  write_json(cfg, "optimize.json", doc, out);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Four-wave-mixing toolbox simulator", "fwm"};
  app.set_version_flag("--version", std::string(kToolName) + " " + tool_version());
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir, scheme;
  std::uint64_t seed = 0;
  int cutoff = 0;
  app.add_option("--config", config_path, "Run configuration (JSON)")->required();
  auto* out_opt = app.add_option("--out", out_dir, "Output directory");
  auto* scheme_opt = app.add_option("--scheme", scheme, "Scheme override: bm, ck, sq2 or sq1");
  auto* seed_opt = app.add_option("--seed", seed, "Optimizer seed");
  auto* cutoff_opt = app.add_option("--cutoff", cutoff, "Fock cutoff for both modes");

  app.add_subcommand("derive", "Closed-form effective parameters and dispersive check");
  app.add_subcommand("run", "Time evolution with overlap traces");
  app.add_subcommand("sweep", "b0 energy sweep or E_mx fidelity sweep");
  app.add_subcommand("optimize", "Controlled-phase fidelity optimization");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolName << ' ' << tool_version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    Overrides ov;
    if (*out_opt) ov.out_dir = out_dir;
    if (*scheme_opt) ov.scheme = scheme;
    if (*seed_opt) ov.seed = seed;
    if (*cutoff_opt) ov.cutoff = cutoff;
    const RunConfig cfg = load_config(config_path, ov);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "derive") cmd_derive(cfg, out);
    else if (cmd == "run") cmd_run(cfg, out);
    else if (cmd == "sweep") cmd_sweep(cfg, out);
    else cmd_optimize(cfg, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error at " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace fwm::cli
