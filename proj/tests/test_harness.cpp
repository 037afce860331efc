#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "pcsft/harness.hpp"

namespace pcsft {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pcsft-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(PCSFT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump();
  return p;
}

TEST(Config, MinimalAndDefaults) {
  const ExperimentConfig c = parse_config(json{{"experiment", "alpha-scan"}, {"seed", 42}});
  EXPECT_EQ(c.experiment, "alpha-scan");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_FALSE(c.n.has_value());
  EXPECT_EQ(c.grid.points, 128);
  EXPECT_EQ(c.workers, 1u);
  EXPECT_EQ(c.variable, "all");
  EXPECT_EQ(c.tolerance("z", 3.0), 3.0);
}

TEST(Config, FullConfigParses) {
  const json j = {{"experiment", "field-spectrum"},
                  {"seed", 7},
                  {"n", 4},
                  {"samples", 1000},
                  {"alphas", {0.1, 0.01}},
                  {"grid", {{"points", 64}, {"length", 10.0}, {"boundary", "dirichlet"}, {"mass", 2.0}}},
                  {"variable", "quadratic"},
                  {"workers", 3},
                  {"out", "reports"},
                  {"tolerances", {{"ratio", 0.4}}}};
  const ExperimentConfig c = parse_config(j);
  EXPECT_EQ(*c.n, 4);
  EXPECT_EQ(*c.samples, 1000);
  EXPECT_EQ(c.alphas->size(), 2u);
  EXPECT_EQ(c.grid.boundary, "dirichlet");
  EXPECT_EQ(c.grid.mass, 2.0);
  EXPECT_EQ(c.workers, 3u);
  EXPECT_EQ(c.tolerance("ratio", 0.5), 0.4);
}

TEST(Config, RejectsInvalidInput) {
  const json base = {{"experiment", "alpha-scan"}, {"seed", 1}};
  auto with = [&](const std::string& key, const json& value) {
    json j = base;
    j[key] = value;
    return j;
  };
  EXPECT_THROW(parse_config(with("colour", "blue")), ConfigError);
  EXPECT_THROW(parse_config(json{{"experiment", "alpha-scan"}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"seed", 1}}), ConfigError);
  EXPECT_THROW(parse_config(with("experiment", "no-such-experiment")), ConfigError);
  EXPECT_THROW(parse_config(with("seed", -1)), ConfigError);
  EXPECT_THROW(parse_config(with("seed", "42")), ConfigError);
  EXPECT_THROW(parse_config(with("n", 0)), ConfigError);
  EXPECT_THROW(parse_config(with("samples", 10)), ConfigError);
  EXPECT_THROW(parse_config(with("alphas", json::array({0.01, 0.1}))), ConfigError);
  EXPECT_THROW(parse_config(with("alphas", json::array({0.1, -0.01}))), ConfigError);
  EXPECT_THROW(parse_config(with("grid", json{{"points", 8}})), ConfigError);
  EXPECT_THROW(parse_config(with("grid", json{{"spacing", 0.1}})), ConfigError);
  EXPECT_THROW(parse_config(with("grid", json{{"boundary", "open"}})), ConfigError);
  EXPECT_THROW(parse_config(with("variable", "sextic")), ConfigError);
  EXPECT_THROW(parse_config(with("workers", 0)), ConfigError);
  EXPECT_THROW(parse_config(with("tolerances", json{{"bogus", 1.0}})), ConfigError);
  EXPECT_THROW(parse_config(with("tolerances", json{{"z", -1.0}})), ConfigError);
  EXPECT_THROW(parse_config(json::array()), ConfigError);
}

TEST(Config, LoadReportsMalformedFiles) {
  const fs::path dir = scratch_dir("load");
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.json"), ConfigError);
}

TEST(Config, HashIgnoresOutputAndWorkers) {
  ExperimentConfig a = parse_config(json{{"experiment", "alpha-scan"}, {"seed", 5}});
  ExperimentConfig b = a;
  b.workers = 8;
  b.out = "/elsewhere";
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  b.seed = 6;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_FALSE(a.canonical().contains("workers"));
  EXPECT_TRUE(a.canonical().at("n").is_null());
}

TEST(Registry, ContainsTheExperiments) {
  std::vector<std::string> names;
  for (const auto& e : experiment_registry()) names.push_back(e.name);
  for (const char* want : {"schrodinger-equivalence", "dispersion-preservation", "heisenberg-check",
                           "von-neumann-square", "purestate-sampling", "alpha-scan", "norm-audit", "oddness-audit",
                           "field-spectrum", "field-correspondence"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
  }
  std::ostringstream os;
  list_experiments(os);
  EXPECT_NE(os.str().find("alpha-scan"), std::string::npos);
  EXPECT_THROW(run(ExperimentConfig{}), ConfigError);
}

TEST(Report, MetricHelpers) {
  ReportRecord r;
  EXPECT_TRUE(r.at_most("a.x", 1.0, 2.0).pass);
  EXPECT_FALSE(r.at_least("a.y", 1.0, 2.0).pass);
  EXPECT_TRUE(r.abs_diff("b.z", 1.05, 1.0, 0.1).pass);
  EXPECT_TRUE(r.z_score("b.w", 1.2, 1.0, 0.1, 3.0).pass);
  EXPECT_FALSE(r.passed());
  EXPECT_TRUE(r.passed("b."));
  EXPECT_FALSE(r.passed("a."));
  EXPECT_FALSE(r.passed("c."));
}

TEST(Report, IdenticalConfigsGiveByteIdenticalFiles) {
  json j = {{"experiment", "alpha-scan"},
            {"seed", 42},
            {"samples", 5000},
            {"alphas", {0.1, 0.03, 0.01}},
            {"variable", "example-9.1"}};
  const fs::path d1 = scratch_dir("det1"), d3 = scratch_dir("det3");
  ExperimentConfig c1 = parse_config(j);
  c1.out = d1.string();
  c1.workers = 1;
  ExperimentConfig c3 = c1;
  c3.out = d3.string();
  c3.workers = 3;
  run(c1);
  run(c3);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(d1)) {
    ++files;
    const fs::path other = d3 / entry.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
  }
  EXPECT_GE(files, 4u);  // report json + csv and the scan artifacts

  const json report = json::parse(slurp(d1 / "alpha-scan.json"));
  EXPECT_EQ(report.at("schema_version").get<int>(), kReportSchemaVersion);
  EXPECT_EQ(report.at("config_hash").get<std::string>(), c1.hash());
  EXPECT_FALSE(report.contains("duration_seconds"));
  EXPECT_FALSE(report.at("conventions").get<std::string>().empty());
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch_dir("cli");
  EXPECT_EQ(cli("list"), 0);
  EXPECT_EQ(cli(""), 2);
  EXPECT_EQ(cli("run"), 2);
  EXPECT_EQ(cli("run " + (dir / "missing.json").string()), 2);

  const fs::path no_seed = write_config(dir, json{{"experiment", "schrodinger-equivalence"}});
  EXPECT_EQ(cli("run " + no_seed.string()), 2);
  // The command-line seed does not stand in for a missing config seed: the
  // file itself must be reproducible.
  EXPECT_EQ(cli("run " + no_seed.string() + " --seed 3"), 2);

  const fs::path ok = write_config(dir, json{{"experiment", "schrodinger-equivalence"}, {"seed", 42}, {"n", 2}});
  EXPECT_EQ(cli("run " + ok.string() + " --out " + (dir / "out").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "schrodinger-equivalence.json"));
  EXPECT_EQ(cli("run " + ok.string() + " --workers 0"), 2);

  const fs::path strict = write_config(dir, json{{"experiment", "schrodinger-equivalence"},
                                                 {"seed", 42},
                                                 {"n", 2},
                                                 {"tolerances", {{"identity", 1e-300}}}});
  EXPECT_EQ(cli("run " + strict.string()), 1);
}

TEST(Cli, SeedFlagOverridesConfig) {
  const fs::path dir = scratch_dir("override");
  const fs::path cfg = write_config(dir, json{{"experiment", "schrodinger-equivalence"}, {"seed", 1}, {"n", 2}});
  ASSERT_EQ(cli("run " + cfg.string() + " --seed 99 --out " + (dir / "a").string()), 0);
  const json report = json::parse(slurp(dir / "a" / "schrodinger-equivalence.json"));
  EXPECT_EQ(report.at("config").at("seed").get<int>(), 99);
}

}  // namespace
}  // namespace pcsft
