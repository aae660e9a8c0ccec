#pragma once

#include <ostream>

namespace stylelens::cli {

/// Exit codes: 0 success, 2 usage or validation error, 3 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stylelens::cli
