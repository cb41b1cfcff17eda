#pragma once

#include <iosfwd>

namespace thermoprobe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the `thermoprobe` tool. Results go to --out or `out`,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Thread budget: THERMOPROBE_THREADS if set (must be a positive integer),
/// else hardware concurrency. Throws InvalidArgument on a malformed value.
unsigned thread_budget();

}  // namespace thermoprobe::cli
