#pragma once

// `wltest` subcommands. run_cli parses argv-style arguments and writes only to
// the given streams, so tests can drive it in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace wlt::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kData = 3,
  kDegenerate = 4,
  kIo = 5,
};

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Largest p accepted by `power` (dense p x p covariances).
inline constexpr std::size_t kMaxPowerDim = 2000;

} // namespace wlt::cli
