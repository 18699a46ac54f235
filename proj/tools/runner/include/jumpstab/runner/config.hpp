#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jumpstab/error.hpp"
#include "jumpstab/integrator.hpp"

namespace jumpstab::runner {

/// Malformed configuration text (exit status 2).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A configuration value as written: a scalar token, a quoted string or a
/// bracketed list. Interpretation happens on access.
struct Value {
  enum class Kind { kScalar, kString, kList };
  Kind kind = Kind::kScalar;
  std::string text;
  std::vector<std::string> items;
  int line = 0;

  double as_number(const std::string& key) const;
  std::uint64_t as_u64(const std::string& key) const;
  std::int64_t as_int(const std::string& key) const;
  std::string as_string(const std::string& key) const;
  std::vector<double> as_vector(const std::string& key) const;
  std::vector<std::string> as_string_list(const std::string& key) const;
};

/// Parses a single value token as it would appear after '='.
Value parse_value_text(const std::string& text);

/// section -> key -> value, in file order of first appearance.
using RawConfig = std::map<std::string, std::map<std::string, Value>>;

/// Parses "[section]" headers and "key = value" lines. '#' starts a comment
/// outside quotes. Throws ParseError with the line number on any syntax
/// error or duplicated key.
RawConfig parse_config_text(const std::string& text);

enum class OutputKind { kPaths, kOccupation, kReport };
std::string_view to_string(OutputKind k);

struct ScenarioConfig {
  std::string scenario;
  std::map<std::string, Value> parameters;
  IntegratorConfig integrator;
  std::size_t ensemble = 16;
  std::vector<OutputKind> outputs{OutputKind::kPaths, OutputKind::kOccupation,
                                  OutputKind::kReport};
  std::string output_dir = "jumpstab-out";
  std::size_t trajectory_paths = 4;
  /// Text the configuration was read from, for the manifest hash.
  std::string source;

  bool wants(OutputKind k) const;
};

/// Builds a ScenarioConfig from parsed text. Unknown sections or keys,
/// wrong value kinds and invalid integrator settings throw ValidationError.
/// Scenario parameters are checked later against the scenario's schema.
ScenarioConfig make_scenario_config(const RawConfig& raw, std::string source);

/// Reads and parses a file; a missing file is a ParseError.
ScenarioConfig load_scenario_config(const std::string& path);

/// 64-bit FNV-1a hash, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace jumpstab::runner
