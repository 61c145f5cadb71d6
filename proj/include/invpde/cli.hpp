#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace invpde {

/// Runs the command-line tool on the given arguments (without argv[0]).
/// Returns the process exit code: 0 on success, 1 when a verification suite
/// reports failures, 2 for usage or input errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace invpde
