#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jumpstab/runner/config.hpp"

namespace jumpstab::runner {

/// Exit statuses of the command-line runner.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitParse = 2,
  kExitValidation = 3,
  kExitDivergence = 4,
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<unsigned> threads;
};

void apply(const Overrides& o, ScenarioConfig& cfg);

struct RunSummary {
  std::string output_dir;
  std::vector<std::string> files;
  double wall_seconds = 0.0;
};

/// Runs the scenario, then writes the requested CSV files and manifest.json
/// into cfg.output_dir. Nothing is written unless the computation succeeds.
RunSummary run_scenario(const ScenarioConfig& cfg);

/// Human-readable or tab-separated listing of the built-in scenarios.
void list_scenarios(std::ostream& out, bool machine);

/// Full command line: `run <config> [--seed N] [--out DIR] [--threads N]`
/// and `list [--machine]`. Errors go to `err` as a single JSON line.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jumpstab::runner
