#pragma once

#include <iosfwd>

namespace lrsp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolverFailure = 3;

/// Entry point of the `lrsp` tool, parameterized on its output streams for testing.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lrsp::cli
