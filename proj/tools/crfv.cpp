#include "crfv/app.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

int guarded(const std::function<crfv::Outcome()>& body) {
  try {
    const crfv::Outcome o = body();
    int passed = 0;
    for (const auto& c : o.certificates) passed += c.passed ? 1 : 0;
    std::cout << passed << "/" << o.certificates.size() << " certificates passed\n";
    return o.exit_code();
  } catch (const crfv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed CR finite element / finite volume solver for compressible Navier-Stokes with inflow/outflow"};
  app.require_subcommand(1);

  std::string config;
  auto* solve = app.add_subcommand("solve", "run the configured case and write ledgers");
  solve->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);

  auto* check = app.add_subcommand("check", "identity suite on the configured mesh");
  check->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);

  std::vector<int> levels;
  auto* conv = app.add_subcommand("convergence", "refinement study with EOC table");
  conv->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);
  conv->add_option("--levels,-L", levels, "cells per side of each level (default: config 'levels')")
      ->check(CLI::PositiveNumber);

  auto* keys = app.add_subcommand("keys", "list recognized config keys");

  CLI11_PARSE(app, argc, argv);

  if (*keys) {
    for (const auto& [k, h] : crfv::config_keys()) std::cout << k << "\t" << h << "\n";
    return 0;
  }
  return guarded([&] {
    const crfv::RunConfig cfg = crfv::load_config_file(config);
    if (*solve) return crfv::run_solve(cfg, std::cout);
    if (*check) return crfv::run_check(cfg, std::cout);
    return crfv::run_convergence(cfg, levels.empty() ? cfg.levels : levels, std::cout);
  });
}
