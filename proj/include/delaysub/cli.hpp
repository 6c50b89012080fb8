#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "delaysub/config.hpp"

namespace delaysub {

enum class Command { Solve, TemporalStudy, SpatialStudy, Oracle, Probe, Weights, Stability };

std::string to_string(Command command);
Command command_from_string(const std::string& s);
std::vector<std::string> command_names();

struct DispatchOptions {
  std::filesystem::path out_dir;  // empty: the config's output.directory
  int jobs = 1;
};

/// Runs one command and writes its artifacts; returns the files written, in order.
/// Throws ConfigurationError when the config lacks a block the command needs.
std::vector<std::filesystem::path> dispatch(Command command, const RunConfig& config, const DispatchOptions& options);

/// Text artifacts, exposed so tests can check them without touching the filesystem.
std::string weights_csv(const WeightsConfig& weights);
std::string stability_csv(const StabilityReport& report);
std::string snapshot_csv(const SolutionHistory& history, int n);
std::string oracle_csv(const ProblemConfig& problem, const OracleConfig& oracle);
std::string probe_csv(const ProbeReport& report);

}  // namespace delaysub
