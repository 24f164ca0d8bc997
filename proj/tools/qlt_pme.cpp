#include <csignal>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

extern "C" void on_interrupt(int) { qlpme::cli::interrupt_flag().store(true); }

}  // namespace

int main(int argc, char** argv) {
  using namespace qlpme::cli;

  CLI::App app{"qlt_pme: regularized porous-medium lab for the quasilinear plasma model"};
  app.require_subcommand(1);
  std::string config_path;
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&, std::ostream&);
  };
  const Command commands[] = {
      {"solve", "Solve the regularized problem at one n", cmd_solve},
      {"sweep", "Solve over a list of n and report convergence diagnostics", cmd_sweep},
      {"equilibrium", "Build the equilibrium profile M and its positive part", cmd_equilibrium},
      {"validate", "Run the acceptance criteria and print a pass/fail table", cmd_validate},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "Run configuration file")->check(CLI::ExistingFile);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  for (const auto& c : commands) {
    if (!app.got_subcommand(c.name)) continue;
    return guarded_run(
        [&] {
          const RunConfig config = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
          return c.run(config, std::cout);
        },
        std::cerr);
  }
  return kConfigError;
}
