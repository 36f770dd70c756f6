#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace stealthguard {

// Exit codes shared by every subcommand.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitInvalid = 2;

inline constexpr std::uint64_t kDefaultSeed = 20160601;

/// Runs the `stealthguard` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace stealthguard
