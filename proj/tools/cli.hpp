#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace michell::cli {

/// Exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitToleranceFail = 2;
inline constexpr int kExitUsage = 64;

/// Entry point behind the `michell` executable; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace michell::cli
