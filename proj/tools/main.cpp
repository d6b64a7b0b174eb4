#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "neulap/config.hpp"
#include "neulap/errors.hpp"
#include "neulap/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Neumann-Laplacian thin-channel spectral laboratory"};
  app.require_subcommand(1);
  app.footer(neulap::cli::config_reference());

  std::string config_path;
  neulap::cli::RunOptions options;

  CLI::App* run_cmd = app.add_subcommand("run", "execute the configured experiment");
  run_cmd->add_option("--config", config_path, "experiment config file")->required();
  run_cmd->add_option("--jobs", options.jobs, "parallel sweep workers")
      ->default_val(1)
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", options.out_dir, "output directory (default: config output.path)");
  run_cmd->add_flag("--dump-mesh", options.dump_mesh, "also dump mesh files per sweep row");

  CLI::App* validate_cmd = app.add_subcommand("validate", "parse and check a config file");
  validate_cmd->add_option("--config", config_path, "experiment config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const neulap::cli::ExperimentConfig config = neulap::cli::load_config(config_path);
    if (validate_cmd->parsed()) {
      std::printf("ok: %s (experiment %s)\n", config_path.c_str(),
                  neulap::cli::experiment_name(config.experiment));
      return 0;
    }
    return neulap::cli::run(config, options);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
