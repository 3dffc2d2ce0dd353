#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace feedsim {

/// Common command-line options; seed and threads fall back to the [run]
/// section of the config, then to defaults (seed 0, one thread).
struct RunOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

/// Each runner loads and validates its config, executes deterministically
/// (independent of thread count), writes outputs under out_dir, and prints a
/// short summary to stdout. ConfigError signals a bad config; other
/// exceptions signal numeric failures.
void run_simulate(const RunOptions& options);
void run_sweep(const RunOptions& options);
void run_experiment(const RunOptions& options);
void run_pricing(const RunOptions& options);
void run_bandwidth(const RunOptions& options);

}  // namespace feedsim
