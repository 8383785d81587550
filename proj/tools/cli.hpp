#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ddestab {

inline constexpr int kExitStable = 0;
inline constexpr int kExitUnstable = 1;
inline constexpr int kExitUndecided = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitFailure = 70;

/// Entry point of the ddestab tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddestab
