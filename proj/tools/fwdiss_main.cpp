#include <CLI11.hpp>

#include <iostream>

#include "fwdiss/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral simulation and rate verification for the dissipative Fornberg-Whitham equation"};
  app.require_subcommand(1);
  fwdiss::cli::Options options;
  std::string config;
  std::string out = "fwdiss_out";
  double tolerance = 0.0;

  const auto presets = fwdiss::cli::preset_names();
  for (const std::string& name : fwdiss::cli::commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "section.key = value file (a manifest works too)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->capture_default_str();
    if (name != "simulate") sub->add_option("--tolerance", tolerance, "override the command's tolerance");
    sub->add_option("--preset", options.preset, "default, kernel, subcritical, critical, supercritical")
        ->check(CLI::IsMember(presets))
        ->capture_default_str();
    sub->callback([&options, name] { options.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(fwdiss::ExitCode::configuration);
  }
  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--config")) options.config = config;
    if (sub->get_option_no_throw("--tolerance") && sub->count("--tolerance")) options.tolerance = tolerance;
  }
  options.out = out;
  return fwdiss::cli::dispatch(options, std::cout, std::cerr);
}
