#include <iostream>

#include "CLI11.hpp"
#include "fracwave/cli.hpp"

int main(int argc, char** argv) {
  using fracwave::cli::Command;
  CLI::App app{"Time-fractional wave equation solver and estimate verifier"};
  app.set_version_flag("--version", fracwave::cli::kVersion);
  app.require_subcommand(1);

  fracwave::cli::RunOptions options;
  std::string config;
  std::string out_dir = "out";
  std::size_t threads = 0;
  std::uint64_t seed = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"solve", "Solve the configured problem and write field.csv, coeffs.csv, norms.json, run.json"},
      {"verify", "Run the verification batteries and write witnesses.json"},
      {"convergence", "Run refinement ladders and write convergence.csv"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "Problem file")->required();
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads (default: FRACWAVE_THREADS, then all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Override problem.seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fracwave::cli::kConfigError;
  }

  const std::string chosen = app.get_subcommands().front()->get_name();
  options.command = chosen == "solve" ? Command::Solve : chosen == "verify" ? Command::Verify : Command::Convergence;
  options.config = config;
  options.out_dir = out_dir;
  const CLI::App* sub = app.get_subcommand(chosen);
  if (sub->count("--threads")) options.threads = threads;
  if (sub->count("--seed")) options.seed = seed;
  return fracwave::cli::run(options, std::cout, std::cerr);
}
