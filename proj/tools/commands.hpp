#pragma once

#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace swe::cli {

enum ExitCode : int {
  kOk = 0,
  kConfig = 2,
  kSolver = 3,
  kOptimizer = 4,
  kDegenerate = 5,
  kCgFailure = 6,
};

struct CommandOptions {
  RunConfig config;
  std::filesystem::path out_dir;
  int threads = 1;
  bool oracle = false;
};

std::vector<std::string> command_names();

/// Maps an exception to the public exit-code contract.
int exit_code_for(std::exception_ptr error);

/// Runs one subcommand, writes its CSV tables and manifest.json into
/// `out_dir` and returns the exit code. Failures are logged, recorded in the
/// manifest and mapped through exit_code_for.
int run_command(const std::string& name, const CommandOptions& options);

/// Smooth unit-amplitude test direction drawn from `seed`.
Field probe_direction(const Grid& grid, std::uint64_t seed);

/// eps_count log-spaced values from eps_max down to eps_min.
std::vector<double> epsilon_sweep(double eps_min, double eps_max, int count);

}  // namespace swe::cli
