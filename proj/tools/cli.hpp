#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hjlab::cli {

enum ExitCode : int { ok = 0, internal_error = 1, validation_error = 2, non_convergence = 3 };

/// Entry point shared by the binary and the tests. argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hjlab::cli
