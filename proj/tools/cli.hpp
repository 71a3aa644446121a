#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace confocal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;

/// Runs `confocal-forge` with the given arguments (argv[0] is the program
/// name). Returns the process exit code: 0 ok, 1 usage error, 2 domain or
/// runtime error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload for tests; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace confocal::cli
