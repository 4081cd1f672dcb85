#include <CLI11.hpp>

#include "subsim/io/runner.hpp"

#include <cstdlib>

int main(int argc, char** argv) {
  CLI::App app{"subsim: collective-decay and lattice-clock simulation toolkit"};
  app.require_subcommand(1);

  std::string config_path, output_dir, log_level = "info";
  int threads = 0;

  auto* run = app.add_subcommand("run", "execute a scenario config");
  run->add_option("-c,--config", config_path, "config file (JSON)")->required();
  run->add_option("-o,--output-dir", output_dir, "override the output directory");
  run->add_option("-j,--threads", threads, "BLAS thread count override");
  run->add_option("--log-level", log_level, "quiet|info|debug");

  auto* validate = app.add_subcommand("validate", "check a scenario config");
  validate->add_option("-c,--config", config_path, "config file (JSON)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (threads > 0) {
    // affects scheduling only; results are accumulated in trajectory order
    setenv("OPENBLAS_NUM_THREADS", std::to_string(threads).c_str(), 1);
  }

  if (app.got_subcommand("validate")) return subsim::io::validate_config(config_path);
  return subsim::io::run_experiment(config_path, output_dir);
}
