#include "jumpstab/runner/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <Eigen/Core>

#include "jumpstab/runner/scenarios.hpp"
#include "jumpstab/version.hpp"

namespace jumpstab::runner {

namespace fs = std::filesystem;

void apply(const Overrides& o, ScenarioConfig& cfg) {
  if (o.seed) cfg.integrator.master_seed = *o.seed;
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  if (o.threads) cfg.integrator.threads = *o.threads;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f << content;
  if (!f.flush()) throw Error("failed writing " + path.string());
}

}  // namespace

RunSummary run_scenario(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const ScenarioOutput result = execute_scenario(cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<std::pair<std::string, const std::string*>> files;
  if (cfg.wants(OutputKind::kPaths)) files.emplace_back("trajectories.csv", &result.trajectories);
  if (cfg.wants(OutputKind::kOccupation)) files.emplace_back("occupation.csv", &result.occupation);
  if (cfg.wants(OutputKind::kReport)) files.emplace_back("report.csv", &result.report);

  RunSummary summary;
  summary.output_dir = cfg.output_dir;
  summary.wall_seconds = seconds;
  for (const auto& [name, content] : files) summary.files.push_back(name);
  summary.files.push_back("manifest.json");

  nlohmann::ordered_json manifest;
  manifest["scenario"] = cfg.scenario;
  manifest["config_hash"] = fnv1a_hex(cfg.source);
  manifest["seed"] = cfg.integrator.master_seed;
  manifest["versions"] = {
      {"jumpstab", kVersion},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                    "." + std::to_string(EIGEN_MINOR_VERSION)},
      {"compiler", __VERSION__}};
  manifest["wall_clock_seconds"] = seconds;
  manifest["files"] = summary.files;

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  for (const auto& [name, content] : files) write_file(dir / name, *content);
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return summary;
}

void list_scenarios(std::ostream& out, bool machine) {
  for (const auto& s : scenario_catalog()) {
    if (!s.listed) continue;
    std::string params;
    for (const auto& p : s.params) {
      if (!params.empty()) params += machine ? "," : ", ";
      params += p.name;
    }
    if (machine) {
      out << s.name << '\t' << s.topic << '\t' << params << '\n';
    } else {
      out << s.name << " -> " << s.topic << "\n    parameters: " << params << '\n';
    }
  }
}

namespace {

void error_line(std::ostream& err, const char* kind, int code, const std::string& msg) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["exit_code"] = code;
  j["message"] = msg;
  err << j.dump() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"jumpstab: stability experiments for coupled jump diffusions"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  unsigned threads = 0;
  auto* run = app.add_subcommand("run", "Run a scenario configuration");
  run->add_option("config", config_path, "Scenario configuration file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the master seed");
  auto* out_opt = run->add_option("--out", out_dir, "Override the output directory");
  auto* threads_opt = run->add_option("--threads", threads, "Worker threads (0 = all cores)");

  bool machine = false;
  auto* list = app.add_subcommand("list", "List the built-in scenarios");
  list->add_flag("--machine", machine, "One tab-separated scenario per line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    error_line(err, "usage", kExitParse, e.what());
    return kExitParse;
  }

  if (list->parsed()) {
    list_scenarios(out, machine);
    return kExitOk;
  }

  try {
    ScenarioConfig cfg = load_scenario_config(config_path);
    Overrides o;
    if (*seed_opt) o.seed = seed;
    if (*out_opt) o.output_dir = out_dir;
    if (*threads_opt) o.threads = threads;
    apply(o, cfg);
    const auto summary = run_scenario(cfg);
    out << "wrote";
    for (const auto& f : summary.files) out << ' ' << (fs::path(summary.output_dir) / f).string();
    out << '\n';
    return kExitOk;
  } catch (const ParseError& e) {
    error_line(err, "parse", kExitParse, e.what());
    return kExitParse;
  } catch (const ValidationError& e) {
    error_line(err, "validation", kExitValidation, e.what());
    return kExitValidation;
  } catch (const ConfigError& e) {
    error_line(err, "validation", kExitValidation, e.what());
    return kExitValidation;
  } catch (const AssumptionViolation& e) {
    error_line(err, "validation", kExitValidation, e.what());
    return kExitValidation;
  } catch (const DivergenceError& e) {
    error_line(err, "divergence", kExitDivergence, e.what());
    return kExitDivergence;
  } catch (const std::exception& e) {
    error_line(err, "failure", kExitFailure, e.what());
    return kExitFailure;
  }
}

}  // namespace jumpstab::runner
