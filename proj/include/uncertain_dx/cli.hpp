#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace udx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInference = 3;

/// Runs the command line in-process. `args` excludes the program name.
/// Returns 0 on success, 2 on input or validation errors, 3 on inference errors.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace udx::cli
