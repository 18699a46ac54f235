#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "jumpstab/jumpstab.hpp"
#include "jumpstab/runner/runner.hpp"
#include "jumpstab/runner/scenarios.hpp"

namespace fs = std::filesystem;
using namespace jumpstab;
using namespace jumpstab::runner;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "jumpstab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("jumpstab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string scenario(const std::string& name) {
  return std::string(JUMPSTAB_SCENARIO_DIR) + "/" + name + ".ini";
}

std::vector<std::string> split_row(const std::string& csv, std::size_t row) {
  std::istringstream in(csv);
  std::string line;
  for (std::size_t k = 0; k <= row; ++k) std::getline(in, line);
  std::vector<std::string> cells;
  std::istringstream ls(line);
  std::string cell;
  while (std::getline(ls, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST(Config, ParsesValuesAndComments) {
  const auto raw = parse_config_text(
      "# top\n[scenario]\nname = linear # trailing\n[parameters]\na = -2.5\n"
      "jump_marks = [0.1, -0.2]\nlabel = \"x # y\"\n");
  EXPECT_EQ(raw.at("scenario").at("name").as_string("name"), "linear");
  EXPECT_EQ(raw.at("parameters").at("a").as_number("a"), -2.5);
  EXPECT_EQ(raw.at("parameters").at("jump_marks").as_vector("jump_marks"),
            (std::vector<double>{0.1, -0.2}));
  EXPECT_EQ(raw.at("parameters").at("label").as_string("label"), "x # y");
}

TEST(Config, SyntaxErrorsAreParseErrors) {
  EXPECT_THROW(parse_config_text("[scenario\nname = x\n"), ParseError);
  EXPECT_THROW(parse_config_text("[scenario]\nname x\n"), ParseError);
  EXPECT_THROW(parse_config_text("[a]\nk = 1\nk = 2\n"), ParseError);
  EXPECT_THROW(parse_config_text("[a]\nk = [1, 2\n"), ParseError);
}

TEST(Config, FnvHashIsStable) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Cli, MalformedConfigExitsWithParseStatus) {
  const auto dir = scratch("malformed");
  const auto cfg = write(dir / "bad.ini", "[scenario\nname = linear\n");
  const auto r = cli({"run", cfg.string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, kExitParse);
  EXPECT_FALSE(fs::exists(dir / "out"));
  EXPECT_NE(r.err.find("\"parse\""), std::string::npos);
}

TEST(Cli, UnknownKeyExitsWithValidationStatus) {
  const auto dir = scratch("unknown");
  const auto cfg = write(dir / "c.ini", "[scenario]\nname = linear\n[parameters]\nbogus = 1\n");
  const auto r = cli({"run", cfg.string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_FALSE(fs::exists(dir / "out"));
  EXPECT_NE(r.err.find("bogus"), std::string::npos);
}

TEST(Cli, ListShowsBuiltins) {
  const auto r = cli({"list", "--machine"});
  EXPECT_EQ(r.code, kExitOk);
  std::istringstream in(r.out);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_NE(line.find('\t'), std::string::npos);
  }
  EXPECT_EQ(rows, 6u);
  EXPECT_EQ(cli({"list"}).code, kExitOk);
  EXPECT_NE(cli({"frobnicate"}).code, kExitOk);
}

TEST(Scenarios, LinearExponentMatchesClosedForm) {
  auto cfg = load_scenario_config(scenario("linear"));
  cfg.outputs = {OutputKind::kReport};
  const auto out = execute_scenario(cfg);
  const auto cells = split_row(out.report, 1);
  ASSERT_GE(cells.size(), 2u);
  EXPECT_NEAR(std::stod(cells[0]), -1.0, 0.05);
}

TEST(Scenarios, SirIsStable) {
  auto cfg = load_scenario_config(scenario("sir"));
  cfg.outputs = {OutputKind::kReport};
  cfg.ensemble = 8;
  const auto out = execute_scenario(cfg);
  EXPECT_NE(out.report.find(",stable"), std::string::npos) << out.report;
}

TEST(Scenarios, RerunIsByteIdentical) {
  const auto dir = scratch("rerun");
  const auto text = slurp(scenario("consensus"));
  const auto cfg = write(dir / "c.ini", text);
  ASSERT_EQ(cli({"run", cfg.string(), "--out", (dir / "a").string()}).code, kExitOk);
  ASSERT_EQ(cli({"run", cfg.string(), "--out", (dir / "b").string()}).code, kExitOk);
  for (const char* f : {"trajectories.csv", "report.csv"}) {
    ASSERT_TRUE(fs::exists(dir / "a" / f));
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  EXPECT_TRUE(fs::exists(dir / "a" / "manifest.json"));
  const auto other = cli({"run", cfg.string(), "--out", (dir / "c").string(), "--seed", "10"});
  ASSERT_EQ(other.code, kExitOk);
  EXPECT_NE(slurp(dir / "a" / "trajectories.csv"), slurp(dir / "c" / "trajectories.csv"));
}

TEST(Scenarios, BadParameterValuesAreValidationErrors) {
  auto cfg = load_scenario_config(scenario("linear"));
  cfg.parameters["x0"] = parse_value_text("0");
  EXPECT_THROW(execute_scenario(cfg), ValidationError);
  EXPECT_THROW(find_scenario("nope"), ValidationError);
}
