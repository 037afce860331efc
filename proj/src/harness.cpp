#include "pcsft/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "pcsft/bridge.hpp"
#include "pcsft/rng.hpp"

namespace pcsft {
namespace {

const std::set<std::string> kTopLevelKeys{"experiment", "seed",    "n",   "samples",   "alphas",
                                          "grid",       "variable", "workers", "out", "tolerances"};
const std::set<std::string> kGridKeys{"points", "length", "boundary", "mass", "spring"};
const std::set<std::string> kVariables{"all", "example-9.1", "quadratic-quartic", "quadratic"};

void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

std::int64_t get_int(const nlohmann::json& j, const std::string& key, std::int64_t lo, std::int64_t hi) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  const std::int64_t x = v.get<std::int64_t>();
  if (x < lo || x > hi) {
    throw ConfigError("'" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return x;
}

double get_positive(const nlohmann::json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("'" + key + "' must be positive and finite");
  return x;
}

std::string get_string(const nlohmann::json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
  return v.get<std::string>();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

const std::vector<std::string>& tolerance_keys() {
  static const std::vector<std::string> keys{"identity", "derivative", "square", "z",
                                             "slope",    "ratio",      "drift",  "field"};
  return keys;
}

double ExperimentConfig::tolerance(const std::string& key, double fallback) const {
  auto it = tolerances.find(key);
  return it == tolerances.end() ? fallback : it->second;
}

nlohmann::json ExperimentConfig::canonical() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["n"] = n ? nlohmann::json(*n) : nlohmann::json(nullptr);
  j["samples"] = samples ? nlohmann::json(*samples) : nlohmann::json(nullptr);
  j["alphas"] = alphas ? nlohmann::json(*alphas) : nlohmann::json(nullptr);
  j["grid"] = {{"points", grid.points},
               {"length", grid.length},
               {"boundary", grid.boundary},
               {"mass", grid.mass},
               {"spring", grid.spring}};
  j["variable"] = variable;
  j["tolerances"] = nlohmann::json::object();
  for (const auto& [k, v] : tolerances) j["tolerances"][k] = v;
  return j;
}

std::string ExperimentConfig::hash() const {
  const std::string text = canonical().dump();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text.data(), text.size())));
  return buf;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, kTopLevelKeys, "config");
  ExperimentConfig c;
  if (!j.contains("experiment")) throw ConfigError("missing required key 'experiment'");
  c.experiment = get_string(j, "experiment");
  const auto& registry = experiment_registry();
  if (std::none_of(registry.begin(), registry.end(), [&](const ExperimentInfo& e) { return e.name == c.experiment; })) {
    throw ConfigError("unknown experiment '" + c.experiment + "'");
  }
  if (!j.contains("seed")) throw ConfigError("missing required key 'seed'");
  const auto& seed = j["seed"];
  if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
    throw ConfigError("'seed' must be a non-negative 64-bit integer");
  }
  c.seed = seed.get<std::uint64_t>();
  if (j.contains("n")) c.n = get_int(j, "n", 1, 64);
  if (j.contains("samples")) c.samples = get_int(j, "samples", 100, std::int64_t{1} << 32);
  if (j.contains("alphas")) {
    const auto& a = j["alphas"];
    if (!a.is_array() || a.empty()) throw ConfigError("'alphas' must be a non-empty array");
    std::vector<double> alphas;
    for (const auto& v : a) {
      if (!v.is_number() || !(v.get<double>() > 0.0)) throw ConfigError("'alphas' entries must be positive numbers");
      alphas.push_back(v.get<double>());
    }
    for (std::size_t i = 1; i < alphas.size(); ++i) {
      if (!(alphas[i] < alphas[i - 1])) throw ConfigError("'alphas' must be strictly decreasing");
    }
    c.alphas = std::move(alphas);
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (!g.is_object()) throw ConfigError("'grid' must be an object");
    reject_unknown(g, kGridKeys, "grid");
    if (g.contains("points")) c.grid.points = get_int(g, "points", 16, 512);
    if (g.contains("length")) c.grid.length = get_positive(g, "length");
    if (g.contains("boundary")) {
      c.grid.boundary = get_string(g, "boundary");
      if (c.grid.boundary != "periodic" && c.grid.boundary != "dirichlet") {
        throw ConfigError("'boundary' must be 'periodic' or 'dirichlet'");
      }
    }
    if (g.contains("mass")) c.grid.mass = get_positive(g, "mass");
    if (g.contains("spring")) c.grid.spring = get_positive(g, "spring");
  }
  if (j.contains("variable")) {
    c.variable = get_string(j, "variable");
    if (!kVariables.contains(c.variable)) throw ConfigError("unknown variable '" + c.variable + "'");
  }
  if (j.contains("workers")) c.workers = static_cast<unsigned>(get_int(j, "workers", 1, 256));
  if (j.contains("out")) c.out = get_string(j, "out");
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) throw ConfigError("'tolerances' must be an object");
    const auto& keys = tolerance_keys();
    for (const auto& [key, value] : t.items()) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw ConfigError("unknown tolerance '" + key + "'");
      }
      c.tolerances[key] = get_positive(t, key);
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return parse_config(j);
}

Metric& ReportRecord::at_most(const std::string& name, double value, double tol) {
  metrics.push_back({name, value, 0.0, 0.0, tol, "<=", value <= tol});
  return metrics.back();
}

Metric& ReportRecord::at_least(const std::string& name, double value, double threshold) {
  metrics.push_back({name, value, threshold, 0.0, 0.0, ">=", value >= threshold});
  return metrics.back();
}

Metric& ReportRecord::abs_diff(const std::string& name, double value, double target, double tol) {
  metrics.push_back({name, value, target, 0.0, tol, "abs_diff<=", std::abs(value - target) <= tol});
  return metrics.back();
}

Metric& ReportRecord::z_score(const std::string& name, double value, double target, double se, double z) {
  metrics.push_back({name, value, target, se, z, "z<=", std::abs(value - target) <= z * se});
  return metrics.back();
}

bool ReportRecord::passed() const {
  return std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.pass; });
}

bool ReportRecord::passed(const std::string& prefix) const {
  bool any = false;
  for (const Metric& m : metrics) {
    if (m.name.rfind(prefix, 0) != 0) continue;
    any = true;
    if (!m.pass) return false;
  }
  return any;
}

nlohmann::json ReportRecord::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const Metric& m : metrics) {
    rows.push_back({{"name", m.name},
                    {"value", json_number(m.value)},
                    {"target", json_number(m.target)},
                    {"standard_error", json_number(m.standard_error)},
                    {"tolerance", json_number(m.tolerance)},
                    {"comparison", m.comparison},
                    {"pass", m.pass}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"experiment", experiment},
          {"config_hash", config_hash},
          {"config", config},
          {"conventions", conventions},
          {"passed", passed()},
          {"metrics", rows},
          {"notes", notes}};
}

void ReportRecord::write_csv(std::ostream& os) const {
  os << "schema_version,experiment,metric,value,target,standard_error,tolerance,comparison,pass\n";
  for (const Metric& m : metrics) {
    os << kReportSchemaVersion << ',' << experiment << ',' << m.name << ',' << format_double(m.value) << ','
       << format_double(m.target) << ',' << format_double(m.standard_error) << ',' << format_double(m.tolerance)
       << ',' << m.comparison << ',' << (m.pass ? "true" : "false") << '\n';
  }
}

void ReportRecord::write(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create report directory " + dir.string() + ": " + ec.message());
  auto put = [&](const std::string& name, const std::string& text) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("cannot write report file " + path.string());
  };
  put(experiment + ".json", to_json().dump(2) + "\n");
  std::ostringstream csv;
  write_csv(csv);
  put(experiment + ".csv", csv.str());
  for (const Artifact& a : artifacts) put(a.filename, a.content);
}

void list_experiments(std::ostream& os) {
  for (const ExperimentInfo& e : experiment_registry()) {
    os << e.name;
    for (std::size_t pad = e.name.size(); pad < 26; ++pad) os << ' ';
    os << e.description << '\n';
  }
}

ReportRecord run(const ExperimentConfig& config) {
  const auto& registry = experiment_registry();
  auto it = std::find_if(registry.begin(), registry.end(),
                         [&](const ExperimentInfo& e) { return e.name == config.experiment; });
  if (it == registry.end()) throw ConfigError("unknown experiment '" + config.experiment + "'");
  ReportRecord report;
  report.experiment = config.experiment;
  report.config = config.canonical();
  report.config_hash = config.hash();
  report.conventions = kConventions;
  const auto start = std::chrono::steady_clock::now();
  it->body(config, report);
  report.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!config.out.empty()) report.write(config.out);
  return report;
}

}  // namespace pcsft
