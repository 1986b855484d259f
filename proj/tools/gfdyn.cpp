// Command line front end. Exit codes: 0 all checks pass, 1 a check failed,
// 2 configuration error.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gfdyn/app/commands.hpp"
#include "gfdyn/error.hpp"

int main(int argc, char** argv) {
  using namespace gfdyn;
  CLI::App cli{"Numerical experiments on parabolic entire maps"};
  cli.require_subcommand(1, 1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool as_json = false;
  for (const auto& name : app::kCommands) {
    auto* sub = cli.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file (comments allowed)");
    sub->add_option("--out", out_dir, "directory for report.json and artifacts");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", threads, "worker threads, 0 for all cores");
    sub->add_flag("--json", as_json, "print the full JSON report instead of the summary");
  }
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return cli.exit(e) == 0 ? 0 : 2;
  }
  const std::string command = cli.get_subcommands().front()->get_name();

  app::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = app::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    app::validate(cfg);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  app::Report report;
  try {
    report = app::run_command(command, cfg, out_dir);
  } catch (const DynamicsError& e) {
    std::cerr << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  const auto j = report.to_json();
  if (!out_dir.empty()) {
    std::ofstream out(std::filesystem::path(out_dir) / (command + "_report.json"));
    out << j.dump(2) << '\n';
  }
  if (as_json) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << report.summary();
  }
  return report.passed() ? 0 : 1;
}
