#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#ifndef FWM_TOOL_VERSION
#define FWM_TOOL_VERSION "0.0.0"
#endif

namespace fwm::cli {

using nlohmann::json;

std::string tool_version() { return FWM_TOOL_VERSION; }

namespace {

std::string describe(const json& v) {
  switch (v.type()) {
    case json::value_t::null: return "null";
    case json::value_t::boolean: return "a boolean";
    case json::value_t::string: return "a string";
    case json::value_t::array: return "an array";
    case json::value_t::object: return "an object";
    default: return "a number";
  }
}

// Reads the members of one JSON object; finish() rejects whatever was not read.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(at(), "expected an object, got " + describe(j_));
  }

  std::string at(const std::string& key = "") const { return key.empty() ? (path_.empty() ? "/" : path_) : path_ + "/" + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::optional<double> number(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ConfigError(at(key), "expected a number, got " + describe(*v));
    return v->get<double>();
  }

  double number(const std::string& key, double fallback) { return number(key).value_or(fallback); }

  double required(const std::string& key) {
    auto v = number(key);
    if (!v) throw ConfigError(at(key), "required field is missing");
    return *v;
  }

  std::optional<long long> integer(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer, got " + describe(*v));
    return v->get<long long>();
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ConfigError(at(key), "expected a string, got " + describe(*v));
    return v->get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(at(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void check_positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw ConfigError(path, "must be > 0");
}

void check_non_negative(double v, const std::string& path) {
  if (!(v >= 0.0)) throw ConfigError(path, "must be >= 0");
}

int bounded_int(Section& s, const std::string& key, int fallback, int lo, int hi) {
  auto v = s.integer(key);
  if (!v) return fallback;
  if (*v < lo || *v > hi)
    throw ConfigError(s.at(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(*v);
}

constexpr double kFemto = 1e-15;

struct CapKey {
  const char* name;
  double CapacitanceSet::*field;
};
constexpr CapKey kCapKeys[] = {
    {"C_J1", &CapacitanceSet::c_j1}, {"C_J2", &CapacitanceSet::c_j2}, {"C_g1", &CapacitanceSet::c_g1},
    {"C_g2", &CapacitanceSet::c_g2}, {"C_m", &CapacitanceSet::c_m},   {"C_r1", &CapacitanceSet::c_r1},
    {"C_r2", &CapacitanceSet::c_r2}, {"C_01", &CapacitanceSet::c_01}, {"C_02", &CapacitanceSet::c_02},
};

void parse_circuit(const json& j, RunConfig& cfg) {
  Section s(j, "/circuit");
  CircuitParams& p = cfg.circuit;
  p.e_j1 = s.required("E_J1");
  p.e_j2 = s.required("E_J2");
  p.b0 = s.required("b0");
  p.omega_a1 = s.required("omega_a1");
  p.omega_a2 = s.required("omega_a2");
  check_positive(p.omega_a1, s.at("omega_a1"));
  check_positive(p.omega_a2, s.at("omega_a2"));

  if (const json* caps = s.get("capacitances_fF")) {
    for (const char* k : {"E_mx", "g1", "g2", "g2_1", "g2_2", "g3"})
      if (s.has(k)) throw ConfigError(s.at(k), "derived from capacitances_fF; remove it");
    Section c(*caps, s.at("capacitances_fF"));
    CapacitanceSet set;
    for (const auto& k : kCapKeys) {
      const double v = c.required(k.name);
      check_positive(v, c.at(k.name));
      set.*k.field = v;
    }
    c.finish();
    CapacitanceSet farads = set;
    for (const auto& k : kCapKeys) farads.*k.field *= kFemto;
    const DerivedCouplings d = derive_couplings(farads, p.omega_a1, p.omega_a2);
    p.e_mx = d.e_mx;
    p.g1 = d.g1;
    p.g2 = d.g2;
    p.g2_1 = d.g2_1;
    p.g2_2 = d.g2_2;
    p.g3 = d.g3;
    cfg.capacitances = set;
  } else {
    p.e_mx = s.required("E_mx");
    p.g1 = s.required("g1");
    p.g2 = s.required("g2");
    p.g2_1 = s.number("g2_1", 0.0);
    p.g2_2 = s.number("g2_2", 0.0);
    p.g3 = s.number("g3", 0.0);
    check_non_negative(p.e_mx, s.at("E_mx"));
    check_non_negative(p.g1, s.at("g1"));
    check_non_negative(p.g2, s.at("g2"));
  }
  s.finish();
}

Scheme parse_scheme_at(const std::string& value, const std::string& path) {
  try {
    return parse_scheme(value);
  } catch (const std::invalid_argument&) {
    throw ConfigError(path, "unknown scheme '" + value + "' (expected bm, ck, sq2 or sq1)");
  }
}

void parse_drives(const json& j, RunConfig& cfg) {
  if (!j.is_array()) throw ConfigError("/drives", "expected an array, got " + describe(j));
  for (std::size_t i = 0; i < j.size(); ++i) {
    Section s(j[i], "/drives/" + std::to_string(i));
    DriveSpec d;
    d.target_qubit = bounded_int(s, "qubit", 0, 0, 2);
    d.rabi = s.required("rabi");
    d.frequency = s.number("frequency", 0.0);
    check_non_negative(d.rabi, s.at("rabi"));
    check_non_negative(d.frequency, s.at("frequency"));
    s.finish();
    cfg.drives.push_back(d);
  }
}

void parse_detunings(const json& j, RunConfig& cfg) {
  Section s(j, "/detunings");
  cfg.detunings.delta1 = s.number("delta1");
  cfg.detunings.delta2 = s.number("delta2");
  cfg.detunings.delta = s.number("delta");
  cfg.detunings.delta_f = s.number("delta_f");
  s.finish();
}

void parse_cutoffs(const json& j, RunConfig& cfg) {
  Section s(j, "/cutoffs");
  cfg.cutoffs.n_max1 = bounded_int(s, "n_max1", cfg.cutoffs.n_max1, 1, 40);
  cfg.cutoffs.n_max2 = bounded_int(s, "n_max2", cfg.cutoffs.n_max2, 1, 40);
  s.finish();
}

void parse_simulation(const json& j, RunConfig& cfg) {
  Section s(j, "/simulation");
  SimulationConfig& sim = cfg.simulation;
  if (auto f = s.string("frame")) {
    if (*f == "interaction") sim.frame = FrameChoice::interaction;
    else if (*f == "lab") sim.frame = FrameChoice::lab;
    else throw ConfigError(s.at("frame"), "expected 'interaction' or 'lab'");
  }
  sim.duration_ns = s.number("duration_ns");
  if (sim.duration_ns) check_non_negative(*sim.duration_ns, s.at("duration_ns"));
  sim.samples = bounded_int(s, "samples", sim.samples, 1, 10'000'000);
  sim.max_step_ns = s.number("max_step_ns", sim.max_step_ns);
  check_non_negative(sim.max_step_ns, s.at("max_step_ns"));
  sim.convergence_tol = s.number("convergence_tol", sim.convergence_tol);
  check_non_negative(sim.convergence_tol, s.at("convergence_tol"));
  s.finish();
}

void parse_dispersive(const json& j, RunConfig& cfg) {
  Section s(j, "/dispersive");
  auto& d = cfg.dispersive;
  d.nbar1 = s.number("nbar1", d.nbar1);
  d.nbar2 = s.number("nbar2", d.nbar2);
  d.threshold = s.number("threshold", d.threshold);
  check_non_negative(d.nbar1, s.at("nbar1"));
  check_non_negative(d.nbar2, s.at("nbar2"));
  check_positive(d.threshold, s.at("threshold"));
  s.finish();
}

void parse_sweep(const json& j, RunConfig& cfg) {
  Section s(j, "/sweep");
  auto& w = cfg.sweep;
  if (auto v = s.string("variable")) {
    if (*v != "b0" && *v != "emx") throw ConfigError(s.at("variable"), "expected 'b0' or 'emx'");
    w.variable = *v;
  }
  w.from = s.number("from", w.from);
  w.to = s.number("to", w.to);
  w.points = bounded_int(s, "points", w.points, 1, 1'000'000);
  if (const json* vals = s.get("values")) {
    if (!vals->is_array()) throw ConfigError(s.at("values"), "expected an array, got " + describe(*vals));
    for (std::size_t i = 0; i < vals->size(); ++i) {
      if (!(*vals)[i].is_number())
        throw ConfigError(s.at("values") + "/" + std::to_string(i), "expected a number");
      w.values.push_back((*vals)[i].get<double>());
    }
  }
  s.finish();
}

void parse_optimize(const json& j, RunConfig& cfg) {
  Section s(j, "/optimize");
  auto& o = cfg.optimize;
  o.budget = bounded_int(s, "budget", o.budget, 1, 1'000'000);
  if (auto seed = s.integer("seed")) {
    if (*seed < 0) throw ConfigError(s.at("seed"), "must be >= 0");
    o.seed = static_cast<std::uint64_t>(*seed);
  }
  o.span = s.number("span", o.span);
  check_positive(o.span, s.at("span"));
  if (const json* ts = s.get("time_scale")) {
    if (!ts->is_array() || ts->size() != 2 || !(*ts)[0].is_number() || !(*ts)[1].is_number())
      throw ConfigError(s.at("time_scale"), "expected [lo, hi]");
    o.time_lo = (*ts)[0].get<double>();
    o.time_hi = (*ts)[1].get<double>();
    if (!(o.time_lo > 0.0) || !(o.time_hi > o.time_lo))
      throw ConfigError(s.at("time_scale"), "expected 0 < lo < hi");
  }
  s.finish();
}

void parse_outputs(const json& j, RunConfig& cfg) {
  Section s(j, "/outputs");
  if (auto d = s.string("dir")) cfg.out_dir = *d;
  s.finish();
}

}  // namespace

RunConfig parse_config(const json& doc, const Overrides& ov) {
  Section root(doc, "");
  RunConfig cfg;

  const json* circuit = root.get("circuit");
  if (!circuit) throw ConfigError("/circuit", "required section is missing");
  parse_circuit(*circuit, cfg);

  if (ov.scheme) {
    root.get("scheme");
    cfg.scheme = parse_scheme_at(*ov.scheme, "--scheme");
  } else if (auto s = root.string("scheme")) {
    cfg.scheme = parse_scheme_at(*s, "/scheme");
  } else {
    throw ConfigError("/scheme", "required field is missing");
  }

  if (const json* d = root.get("drives")) parse_drives(*d, cfg);
  if (const json* d = root.get("detunings")) parse_detunings(*d, cfg);
  if (const json* d = root.get("cutoffs")) parse_cutoffs(*d, cfg);
  if (const json* d = root.get("simulation")) parse_simulation(*d, cfg);
  if (const json* d = root.get("dispersive")) parse_dispersive(*d, cfg);
  if (const json* d = root.get("sweep")) parse_sweep(*d, cfg);
  if (const json* d = root.get("optimize")) parse_optimize(*d, cfg);
  if (const json* d = root.get("outputs")) parse_outputs(*d, cfg);
  root.finish();

  if (ov.cutoff) {
    if (*ov.cutoff < 1 || *ov.cutoff > 40) throw ConfigError("--cutoff", "must lie in [1, 40]");
    cfg.cutoffs = {*ov.cutoff, *ov.cutoff};
  }
  if (ov.seed) cfg.optimize.seed = *ov.seed;
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
  return cfg;
}

RunConfig load_config(const std::string& path, const Overrides& ov) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc, ov);
}

json to_json(const RunConfig& cfg) {
  json circuit{{"E_J1", cfg.circuit.e_j1},         {"E_J2", cfg.circuit.e_j2},
               {"b0", cfg.circuit.b0},             {"omega_a1", cfg.circuit.omega_a1},
               {"omega_a2", cfg.circuit.omega_a2}};
  if (cfg.capacitances) {
    json caps = json::object();
    for (const auto& k : kCapKeys) caps[k.name] = (*cfg.capacitances).*k.field;
    circuit["capacitances_fF"] = caps;
  } else {
    circuit["E_mx"] = cfg.circuit.e_mx;
    circuit["g1"] = cfg.circuit.g1;
    circuit["g2"] = cfg.circuit.g2;
    circuit["g2_1"] = cfg.circuit.g2_1;
    circuit["g2_2"] = cfg.circuit.g2_2;
    circuit["g3"] = cfg.circuit.g3;
  }

  json drives = json::array();
  for (const auto& d : cfg.drives)
    drives.push_back({{"qubit", d.target_qubit}, {"rabi", d.rabi}, {"frequency", d.frequency}});

  json det = json::object();
  if (cfg.detunings.delta1) det["delta1"] = *cfg.detunings.delta1;
  if (cfg.detunings.delta2) det["delta2"] = *cfg.detunings.delta2;
  if (cfg.detunings.delta) det["delta"] = *cfg.detunings.delta;
  if (cfg.detunings.delta_f) det["delta_f"] = *cfg.detunings.delta_f;

  const auto& sim = cfg.simulation;
  json simulation{{"frame", sim.frame == FrameChoice::lab ? "lab" : "interaction"},
                  {"samples", sim.samples},
                  {"max_step_ns", sim.max_step_ns},
                  {"convergence_tol", sim.convergence_tol}};
  if (sim.duration_ns) simulation["duration_ns"] = *sim.duration_ns;

  json sweep{{"variable", cfg.sweep.variable}, {"from", cfg.sweep.from}, {"to", cfg.sweep.to},
             {"points", cfg.sweep.points}};
  if (!cfg.sweep.values.empty()) sweep["values"] = cfg.sweep.values;

  return json{
      {"circuit", circuit},
      {"scheme", scheme_key(cfg.scheme)},
      {"drives", drives},
      {"detunings", det},
      {"cutoffs", {{"n_max1", cfg.cutoffs.n_max1}, {"n_max2", cfg.cutoffs.n_max2}}},
      {"simulation", simulation},
      {"dispersive",
       {{"nbar1", cfg.dispersive.nbar1}, {"nbar2", cfg.dispersive.nbar2}, {"threshold", cfg.dispersive.threshold}}},
      {"sweep", sweep},
      {"optimize",
       {{"budget", cfg.optimize.budget},
        {"seed", cfg.optimize.seed},
        {"span", cfg.optimize.span},
        {"time_scale", {cfg.optimize.time_lo, cfg.optimize.time_hi}}}},
      {"outputs", {{"dir", cfg.out_dir}}},
  };
}

std::string config_hash(const RunConfig& cfg) {
  // Output location does not change results, so it stays out of the hash.
  json doc = to_json(cfg);
  doc.erase("outputs");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fwm::cli
