#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nullwit {

/// Exit codes of the command-line front end.
namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kValidation = 2;
inline constexpr int kIo = 3;
inline constexpr int kUnknownCase = 4;
}  // namespace exit_code

/// Runs the CLI on `args` (without the program name). Primary output goes to
/// `out` unless --out names a directory, in which case files and a
/// manifest.json are written there; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nullwit
