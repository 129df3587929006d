#pragma once

namespace epinet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

/// Parses argv and runs one subcommand: synth, augment, train, infer, eval,
/// gradcheck. Returns 0 on success, 1 on a runtime or data error and 2 on a
/// usage error.
int dispatch(int argc, const char* const* argv);

}  // namespace epinet::cli
