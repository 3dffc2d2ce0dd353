#include <fmt/format.h>

#include <cstdio>

#include <CLI11.hpp>

#include "feedsim/cli_runner.hpp"
#include "feedsim/config.hpp"
#include "feedsim/io.hpp"

namespace {

struct Command {
  const char* name;
  const char* description;
  void (*run)(const feedsim::RunOptions&);
  feedsim::RunOptions options;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson feed learning simulator and estimator"};
  app.set_version_flag("--version", feedsim::kVersion);
  app.require_subcommand(1);

  Command commands[] = {
      {"simulate", "Simulate belief trajectories next to the analytic rate",
       feedsim::run_simulate, {}},
      {"sweep", "Evaluate rates, influence, and mislearning over a grid",
       feedsim::run_sweep, {}},
      {"experiment",
       "Generate a synthetic study and estimate the interference strength",
       feedsim::run_experiment, {}},
      {"pricing", "Calibrate prices and verify symmetric best responses",
       feedsim::run_pricing, {}},
      {"bandwidth", "Classify learning under a feed budget schedule",
       feedsim::run_bandwidth, {}},
  };

  for (Command& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.description);
    sub->add_option("--config", cmd.options.config_path, "Config file path")
        ->required();
    sub->add_option("--out", cmd.options.out_dir, "Output directory")
        ->required();
    sub->add_option("--seed", cmd.options.seed,
                    "Seed override (default: [run] seed, then 0)");
    sub->add_option("--threads", cmd.options.threads,
                    "Worker threads (default: [run] threads, then 1)");
    sub->callback([&cmd] { cmd.run(cmd.options); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const feedsim::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 3;
  }
  return 0;
}
