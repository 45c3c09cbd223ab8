#pragma once

// Run configuration: a JSON document validated field by field. Unknown keys
// are rejected; every error carries the JSON pointer of the offending field.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fwm/circuit.hpp"
#include "fwm/optimize.hpp"
#include "fwm/schemes.hpp"

namespace fwm::cli {

inline constexpr const char* kToolName = "fwm-toolbox";
std::string tool_version();

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& msg)
      : std::runtime_error(path + ": " + msg), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class FrameChoice { interaction, lab };

struct SimulationConfig {
  FrameChoice frame = FrameChoice::interaction;
  std::optional<double> duration_ns;  // default: the scheme's gate time
  int samples = 2001;
  double max_step_ns = 0.0;
  double convergence_tol = 1e-8;
};

struct DispersiveConfig {
  double nbar1 = 1.0, nbar2 = 1.0, threshold = 0.25;
};

struct SweepConfig {
  std::string variable = "b0";  // b0 | emx
  double from = -2.0, to = 2.0;
  int points = 201;
  std::vector<double> values;  // explicit list, wins over from/to/points
};

struct OptimizeConfig {
  int budget = 300;
  std::uint64_t seed = 1;
  double span = 0.1;
  double time_lo = 0.5, time_hi = 1.6;
};

struct RunConfig {
  CircuitParams circuit;
  // In femtofarads, as given; circuit couplings are derived from it.
  std::optional<CapacitanceSet> capacitances;
  Scheme scheme = Scheme::CrossKerr;
  std::vector<DriveSpec> drives;
  DetuningOverrides detunings;
  FockCutoffs cutoffs{3, 3};
  SimulationConfig simulation;
  DispersiveConfig dispersive;
  SweepConfig sweep;
  OptimizeConfig optimize;
  std::string out_dir = ".";
};

// Command-line overrides, applied before validation of cross-field rules.
struct Overrides {
  std::optional<std::string> scheme;
  std::optional<std::uint64_t> seed;
  std::optional<int> cutoff;
  std::optional<std::string> out_dir;
};

RunConfig parse_config(const nlohmann::json& doc, const Overrides& ov = {});
RunConfig load_config(const std::string& path, const Overrides& ov = {});

// Canonical form: every field present, defaults filled in.
nlohmann::json to_json(const RunConfig& cfg);

// FNV-1a 64 of the canonical JSON text, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace fwm::cli
