#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace respgames::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFalse = 1;
inline constexpr int kUsage = 2;
inline constexpr int kResource = 3;

// Runs one invocation. `args` starts at the subcommand (no program name).
// The JSON envelope, or the human report, goes to `out`; diagnostics go to
// `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Hex SHA-256 of the model text and the formula text, NUL separated.
std::string digest(std::string_view model_text, std::string_view formula_text);

}  // namespace respgames::cli
