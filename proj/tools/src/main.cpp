#include <iostream>

#include <CLI11.hpp>
#include <lagmech/errors.hpp>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"geometric mechanics engine: derive, simulate, verify, frame"};
  app.require_subcommand(1);

  std::string config_name, state_text;

  auto* derive = app.add_subcommand("derive", "print the derived data of a system at a state");
  derive->add_option("--config", config_name, "config file or bundled name")->required();
  derive->add_option("--state", state_text, "2n numbers: q then qdot")->required();

  auto* simulate = app.add_subcommand("simulate", "integrate and emit CSV on stdout");
  simulate->add_option("--config", config_name, "config file or bundled name")->required();

  auto* verify = app.add_subcommand("verify", "run the invariant checks for the config");
  verify->add_option("--config", config_name, "config file or bundled name")->required();

  auto* frame = app.add_subcommand("frame", "classify the reference frame of the config");
  frame->add_option("--config", config_name, "config file or bundled name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    cli::SystemConfig cfg = cli::SystemConfig::parse(cli::load_config_text(config_name));
    if (derive->parsed()) return cli::cmd_derive(cfg, state_text, std::cout);
    if (simulate->parsed()) return cli::cmd_simulate(cfg, std::cout);
    if (verify->parsed()) return cli::cmd_verify(cfg, std::cout);
    if (frame->parsed()) return cli::cmd_frame(cfg, std::cout);
  } catch (const lagmech::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const lagmech::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const lagmech::Error& e) {
    std::cerr << "math error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
