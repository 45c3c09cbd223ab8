#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "fwm/dynamics.hpp"

namespace fwm::cli {

// Exit codes are a stable contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

// "6.359 MHz" below 0.1 GHz in magnitude, "10.87 GHz" otherwise.
std::string format_frequency(double ghz);

// `# fwm-toolbox <version> config_hash=<hash>`
std::string csv_header_line(const RunConfig& cfg);

struct RunReference {
  std::string name;
  StateVector state;
};

// Initial state and named references of a `run`, in the scheme frame.
struct RunSetup {
  StateVector initial{FockCutoffs{}};
  std::vector<RunReference> refs;
  // Index into refs of the state whose final population is reported as
  // fidelity; -1 when the scheme has no target state.
  int target = -1;
};
RunSetup run_setup(const SchemeFrame& frame, const EffectiveParams& ep);

// Frame for the configured scheme; rejects drive lists of the wrong length.
SchemeFrame make_frame(const RunConfig& cfg);

nlohmann::json derive_report(const RunConfig& cfg);

// Each command writes its files into cfg.out_dir and a summary to `out`.
void cmd_derive(const RunConfig& cfg, std::ostream& out);
void cmd_run(const RunConfig& cfg, std::ostream& out);
void cmd_sweep(const RunConfig& cfg, std::ostream& out);
void cmd_optimize(const RunConfig& cfg, std::ostream& out);

// Full command line, exceptions mapped onto exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fwm::cli
