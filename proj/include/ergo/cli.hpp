#pragma once

// Command-line driver. Lives in the library so tests can invoke subcommands
// in-process and capture their reports without spawning a binary.

namespace ergo::cli {

inline constexpr const char* kToolName = "ergo";
inline constexpr const char* kToolVersion = "0.1.0";

// exit status: 0 success (an infeasible bound is data, not failure),
// 1 verification violations, 2 usage or input errors, 3 internal errors
int run(int argc, const char* const* argv);

}  // namespace ergo::cli
