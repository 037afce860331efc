// pcsft — command-line runner for the registered experiments.
//
//   pcsft run <config.json> [--seed N] [--out DIR] [--workers W]
//   pcsft list
//
// Flags override the corresponding config-file values. Exit status: 0 when
// every metric passes, 1 when any metric fails, 2 on usage or config errors.

#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "pcsft/harness.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kAssertionFailure = 1;
constexpr int kUsageError = 2;

int run_command(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<std::string> out,
                std::optional<unsigned> workers) {
  pcsft::ExperimentConfig config;
  try {
    config = pcsft::load_config(config_path);
  } catch (const pcsft::ConfigError& e) {
    std::cerr << "pcsft: config error: " << e.what() << '\n';
    return kUsageError;
  }
  if (seed) config.seed = *seed;
  if (out) config.out = *out;
  if (workers) config.workers = *workers;

  pcsft::ReportRecord report;
  try {
    report = pcsft::run(config);
  } catch (const pcsft::ConfigError& e) {
    std::cerr << "pcsft: config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "pcsft: invalid parameters: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "pcsft: " << e.what() << '\n';
    return kAssertionFailure;
  }

  for (const auto& m : report.metrics) {
    std::printf("%-4s %-64s value=%-12.6g %s %.6g\n", m.pass ? "ok" : "FAIL", m.name.c_str(), m.value,
                m.comparison.c_str(), m.comparison == ">=" ? m.target : m.tolerance);
  }
  for (const auto& note : report.notes) std::printf("note: %s\n", note.c_str());
  std::printf("%s: %s (config %s, %.2f s)\n", report.experiment.c_str(), report.passed() ? "PASS" : "FAIL",
              report.config_hash.c_str(), report.duration_seconds);
  return report.passed() ? kPass : kAssertionFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prequantum classical statistical field theory laboratory"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment from a JSON config file");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out, "override the report directory");
  run->add_option("--workers", workers, "worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 256u));

  app.add_subcommand("list", "list registered experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  if (app.got_subcommand("list")) {
    pcsft::list_experiments(std::cout);
    return kPass;
  }
  return run_command(config_path, seed, out, workers);
}
