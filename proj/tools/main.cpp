#include <CLI11.hpp>

#include "minidiss/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = minidiss::cli;
  CLI::App app{"Minimal-dissipation TCL generators and strong-coupling thermodynamics"};
  app.set_version_flag("--version", cli::kVersion);
  app.require_subcommand(1);

  std::string config;
  std::string out = ".";
  auto* run = app.add_subcommand("run", "extract, split and evaluate thermodynamics for a scenario");
  run->add_option("config", config, "scenario JSON")->required();
  run->add_option("--out", out, "output directory")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Monte-Carlo and gauge/minimality suites");
  verify->add_option("config", config, "JSON with checks and seed")->required();
  verify->add_option("--out", out, "output directory")->capture_default_str();

  std::string param;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "run a scenario over values of one parameter");
  sweep->add_option("config", config, "scenario JSON")->required();
  sweep->add_option("--param", param, "parameter name")->required();
  sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
  sweep->add_option("--out", out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kUsage;
  }

  if (*run) return cli::command_run(config, out);
  if (*verify) return cli::command_verify(config, out);
  return cli::command_sweep(config, param, values, out);
}
