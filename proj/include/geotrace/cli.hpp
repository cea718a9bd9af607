#pragma once

#include <iosfwd>

namespace geotrace {

// Exit codes of the geotrace binary.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

// Entry point behind `geotrace`. Never throws; diagnostics go to `err`.
// GEOTRACE_THREADS, when set, replaces the default of --threads.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace geotrace
