#pragma once

namespace augrec {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,        // unknown key, bad value or bad command line
  kExitMissingInput = 3,
};

// Entry point of the `augrec` tool: augment, train, evaluate or ablate.
int run_command(int argc, const char* const* argv);

}  // namespace augrec
