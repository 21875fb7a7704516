#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pbif/cli.hpp"
#include "pbif/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"radial p-Laplace eigenvalue, continuation and checking tool"};

  std::string config_path;
  std::string mode_override;
  std::string out_override;
  long seed = 0;
  int threads = 0;

  app.add_option("--config", config_path, "path to the JSON run configuration")
      ->required();
  app.add_option("--mode", mode_override,
                 "override the configured mode (eig, solve, branch, verify, "
                 "hypotheses, orlicz-demo)");
  app.add_option("--out", out_override, "override the output directory");
  app.add_option("--seed", seed, "seed recorded for randomized trials");
  app.add_option("--threads", threads, "worker threads for branch tracing");

  CLI11_PARSE(app, argc, argv);

  try {
    pbif::cli::RunConfig cfg = pbif::cli::load_config_file(config_path);
    if (app.count("--mode") > 0) cfg.mode = pbif::cli::parse_mode(mode_override);
    if (app.count("--out") > 0) cfg.out_dir = out_override;
    if (app.count("--seed") > 0) cfg.seed = seed;
    if (app.count("--threads") > 0) {
      if (threads < 1) throw pbif::ConfigError("config: threads must be >= 1");
      cfg.threads = threads;
    }
    return pbif::cli::run(cfg);
  } catch (const pbif::ConfigError& e) {
    std::cerr << "[pbif] config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "[pbif] error: " << e.what() << "\n";
    return 3;
  }
}
