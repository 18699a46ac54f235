#pragma once

#include <string>
#include <vector>

#include "jumpstab/runner/config.hpp"

namespace jumpstab::runner {

struct ParamSpec {
  enum class Kind { kNumber, kVector, kString };
  std::string name;
  Kind kind = Kind::kNumber;
  /// Default as configuration text.
  std::string default_value;
  std::string help;
};

struct ScenarioInfo {
  std::string name;
  /// Short description of the model the scenario encodes.
  std::string topic;
  std::vector<ParamSpec> params;
  /// Built-ins are listed by `list`; `custom` is accepted but not listed.
  bool listed = true;
};

const std::vector<ScenarioInfo>& scenario_catalog();
/// Throws ValidationError for an unknown name.
const ScenarioInfo& find_scenario(const std::string& name);

/// Parameter lookup with defaults; rejects unknown keys and wrong kinds on
/// construction.
class Params {
 public:
  Params(const ScenarioInfo& info, const std::map<std::string, Value>& given);

  double number(const std::string& name) const;
  std::vector<double> vector(const std::string& name) const;
  std::string string(const std::string& name) const;

 private:
  const Value& get(const std::string& name) const;

  std::map<std::string, Value> values_;
};

/// CSV text of every output kind the scenario produced. Empty strings mean
/// the kind is not available for the scenario.
struct ScenarioOutput {
  std::string trajectories;
  std::string occupation;
  std::string report;
};

/// Runs the scenario completely in memory. Throws ValidationError for bad
/// parameters and DivergenceError when a fatal path diverges.
ScenarioOutput execute_scenario(const ScenarioConfig& cfg);

}  // namespace jumpstab::runner
