#pragma once

namespace lumen::cli {

enum ExitCode : int {
  kOk = 0,
  kIoFailure = 1,
  kUsage = 2,
  kInvalidInput = 3,
  kNoObservations = 4,
  kEstimationFailed = 5,
};

/// Entry point for the `lumen` tool. Subcommands: simulate, map, evaluate, report.
int run_cli(int argc, const char* const* argv);

}  // namespace lumen::cli
