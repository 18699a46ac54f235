#include "jumpstab/runner/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace jumpstab::runner {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw ParseError("line " + std::to_string(line) + ": " + msg);
}

[[noreturn]] void bad_value(const std::string& key, const Value& v,
                            const std::string& expected) {
  throw ValidationError("key '" + key + "' (line " + std::to_string(v.line) +
                        "): expected " + expected);
}

std::string strip_comment(const std::string& line, int line_no) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  if (quoted) parse_fail(line_no, "unterminated string");
  return line;
}

std::string unquote(const std::string& s, int line_no) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    const std::string inner = s.substr(1, s.size() - 2);
    if (inner.find('"') != std::string::npos) parse_fail(line_no, "stray quote in string");
    return inner;
  }
  if (s.find('"') != std::string::npos) parse_fail(line_no, "stray quote in value");
  return s;
}

Value parse_value(const std::string& raw, int line_no) {
  Value v;
  v.line = line_no;
  if (raw.empty()) parse_fail(line_no, "missing value");
  if (raw.front() == '[') {
    if (raw.back() != ']') parse_fail(line_no, "unterminated list");
    v.kind = Value::Kind::kList;
    v.text = raw;
    const std::string inner = trim(std::string_view(raw).substr(1, raw.size() - 2));
    if (inner.find_first_of("[]") != std::string::npos) parse_fail(line_no, "nested lists are not supported");
    if (inner.empty()) return v;
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) parse_fail(line_no, "empty list item");
      v.items.push_back(unquote(item, line_no));
    }
    if (inner.back() == ',') parse_fail(line_no, "trailing comma in list");
    return v;
  }
  if (raw.front() == '"') {
    v.kind = Value::Kind::kString;
    v.text = unquote(raw, line_no);
    return v;
  }
  if (raw.find_first_of("[]\"") != std::string::npos) parse_fail(line_no, "malformed value");
  v.text = raw;
  return v;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  // strtod accepts hex floats, inf and nan; configuration numbers are plain
  // decimal literals only.
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' ||
          c == 'E' || c == '+' || c == '-')) {
      return false;
    }
  }
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

Value parse_value_text(const std::string& text) { return parse_value(trim(text), 0); }

double Value::as_number(const std::string& key) const {
  double x = 0.0;
  if (kind != Kind::kScalar || !parse_double(text, x)) bad_value(key, *this, "a number");
  return x;
}

std::uint64_t Value::as_u64(const std::string& key) const {
  std::uint64_t x = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (kind != Kind::kScalar || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    bad_value(key, *this, "a nonnegative integer");
  }
  return x;
}

std::int64_t Value::as_int(const std::string& key) const {
  std::int64_t x = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (kind != Kind::kScalar || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    bad_value(key, *this, "an integer");
  }
  return x;
}

std::string Value::as_string(const std::string& key) const {
  if (kind == Kind::kList) bad_value(key, *this, "a string");
  return text;
}

std::vector<double> Value::as_vector(const std::string& key) const {
  if (kind == Kind::kScalar) return {as_number(key)};
  if (kind != Kind::kList) bad_value(key, *this, "a list of numbers");
  std::vector<double> out;
  for (const auto& item : items) {
    double x = 0.0;
    if (!parse_double(item, x)) bad_value(key, *this, "a list of numbers");
    out.push_back(x);
  }
  return out;
}

std::vector<std::string> Value::as_string_list(const std::string& key) const {
  if (kind != Kind::kList) bad_value(key, *this, "a list");
  return items;
}

RawConfig parse_config_text(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line, line_no));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) parse_fail(line_no, "malformed section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      if (section.empty() || section.find_first_of("[] \t=") != std::string::npos) {
        parse_fail(line_no, "malformed section name");
      }
      if (raw.count(section) != 0) parse_fail(line_no, "duplicate section [" + section + "]");
      raw[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "expected 'key = value'");
    if (section.empty()) parse_fail(line_no, "entry outside of any section");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty() || key.find_first_of(" \t[]\"") != std::string::npos) {
      parse_fail(line_no, "malformed key");
    }
    Value v = parse_value(trim(std::string_view(body).substr(eq + 1)), line_no);
    if (!raw[section].emplace(key, std::move(v)).second) {
      parse_fail(line_no, "duplicate key '" + key + "'");
    }
  }
  return raw;
}

std::string_view to_string(OutputKind k) {
  switch (k) {
    case OutputKind::kPaths:
      return "paths";
    case OutputKind::kOccupation:
      return "occupation";
    case OutputKind::kReport:
      return "report";
  }
  return "?";
}

bool ScenarioConfig::wants(OutputKind k) const {
  for (auto o : outputs) {
    if (o == k) return true;
  }
  return false;
}

namespace {

void reject_unknown(const std::map<std::string, Value>& entries,
                    const std::string& section,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, value] : entries) {
    if (allowed.count(key) == 0) {
      throw ValidationError("unknown key '" + key + "' in [" + section + "] (line " +
                            std::to_string(value.line) + ")");
    }
  }
}

}  // namespace

ScenarioConfig make_scenario_config(const RawConfig& raw, std::string source) {
  for (const auto& [name, entries] : raw) {
    if (name != "scenario" && name != "parameters" && name != "integrator" && name != "run") {
      throw ValidationError("unknown section [" + name + "]");
    }
  }
  ScenarioConfig cfg;
  cfg.source = std::move(source);

  const auto sc = raw.find("scenario");
  if (sc == raw.end() || sc->second.count("name") == 0) {
    throw ValidationError("missing [scenario] name");
  }
  reject_unknown(sc->second, "scenario", {"name"});
  cfg.scenario = sc->second.at("name").as_string("name");

  if (auto p = raw.find("parameters"); p != raw.end()) cfg.parameters = p->second;

  if (auto it = raw.find("integrator"); it != raw.end()) {
    const auto& e = it->second;
    reject_unknown(e, "integrator", {"dt", "horizon", "seed", "record_stride"});
    if (e.count("dt")) cfg.integrator.dt = e.at("dt").as_number("dt");
    if (e.count("horizon")) cfg.integrator.horizon = e.at("horizon").as_number("horizon");
    if (e.count("seed")) cfg.integrator.master_seed = e.at("seed").as_u64("seed");
    if (e.count("record_stride")) {
      cfg.integrator.record_stride = e.at("record_stride").as_int("record_stride");
    }
  }
  if (auto it = raw.find("run"); it != raw.end()) {
    const auto& e = it->second;
    reject_unknown(e, "run", {"ensemble", "outputs", "output_dir", "trajectory_paths", "threads"});
    if (e.count("ensemble")) {
      const auto n = e.at("ensemble").as_int("ensemble");
      if (n < 1) throw ValidationError("ensemble must be at least 1");
      cfg.ensemble = static_cast<std::size_t>(n);
    }
    if (e.count("trajectory_paths")) {
      const auto n = e.at("trajectory_paths").as_int("trajectory_paths");
      if (n < 0) throw ValidationError("trajectory_paths must be nonnegative");
      cfg.trajectory_paths = static_cast<std::size_t>(n);
    }
    if (e.count("threads")) {
      const auto n = e.at("threads").as_int("threads");
      if (n < 0) throw ValidationError("threads must be nonnegative");
      cfg.integrator.threads = static_cast<unsigned>(n);
    }
    if (e.count("output_dir")) cfg.output_dir = e.at("output_dir").as_string("output_dir");
    if (e.count("outputs")) {
      cfg.outputs.clear();
      for (const auto& item : e.at("outputs").as_string_list("outputs")) {
        if (item == "paths") {
          cfg.outputs.push_back(OutputKind::kPaths);
        } else if (item == "occupation") {
          cfg.outputs.push_back(OutputKind::kOccupation);
        } else if (item == "report") {
          cfg.outputs.push_back(OutputKind::kReport);
        } else {
          throw ValidationError("unknown output kind '" + item + "'");
        }
      }
    }
  }
  cfg.integrator.validate();
  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read configuration file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  return make_scenario_config(parse_config_text(text), text);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace jumpstab::runner
