#pragma once

// Subcommand dispatch behind the levyflow executable. Each subcommand writes
// into <out>/<subcommand>/: <subcommand>.report.json (deterministic),
// summary.txt, timing.json and its CSV artifacts.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace levyflow {

enum ExitStatus : int {
  kExitPass = 0,
  kExitCheckFailed = 1,
  kExitConfigError = 2,
  kExitNumericalAbort = 3,
};

struct Command {
  std::string subcommand;
  std::optional<std::filesystem::path> config;
  /// "dot.path=value", applied in order.
  std::vector<std::string> overrides;
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand; progress goes to `log`, diagnostics to `err`.
int run(const Command& cmd, std::ostream& log, std::ostream& err);

}  // namespace levyflow
