#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pctlwb {

// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kInternal = 1, kInput = 2, kBudget = 3, kConstruction = 4 };

// argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// Convenience for tests: args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string sha256_hex(std::string_view data);

}  // namespace pctlwb
