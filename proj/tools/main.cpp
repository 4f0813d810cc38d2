#include <CLI11.hpp>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <iostream>

#include "ccres/errors.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace ccres;
  CLI::App app{"Bound states, resonances and their continuation for coupled-channel potentials"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_path;
  bool verbose = false;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration (section.key = value)")->required();
    cmd->add_option("--output", output_path, "CSV destination (default: standard output)");
    cmd->add_flag("--verbose", verbose, "progress and diagnostics on standard error");
  };
  auto* roots = app.add_subcommand("roots", "bound states at the configured parameter value");
  auto* cont = app.add_subcommand("continue", "trace det F = 0 branches in the parameter");
  auto* check = app.add_subcommand("check", "property and oracle suites");
  for (auto* cmd : {roots, cont, check}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::ExitCode::ok : cli::ExitCode::config_error;
  }

  try {
    const RunConfig config = load_config(config_path);
    cli::CommandIo io{std::cout, std::cerr, std::nullopt, verbose};
    if (!output_path.empty()) io.csv = output_path;
    if (roots->parsed()) return cli::cmd_roots(config, io);
    if (cont->parsed()) return cli::cmd_continue(config, io);
    return cli::cmd_check(config, io);
  } catch (const Error& e) {
    fmt::print(std::cerr, "error ({}): {}\n", to_string(e.kind()), e.what());
    return e.kind() == ErrorKind::config ? cli::ExitCode::config_error : cli::ExitCode::numerical_failure;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return cli::ExitCode::numerical_failure;
  }
}
