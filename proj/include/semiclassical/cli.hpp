#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace semiclassical::cli {

/// Exit statuses: 0 pass, 1 check failure, 2 usage or config error, 3 inconclusive.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInconclusive = 3;

/// Runs one subcommand (generate, verify, evolve, compare, gauge) and returns
/// the exit status. argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace semiclassical::cli
