#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sjm::cli {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNumerical = 2;

/// Runs the command line `args` (program name first). Returns the process
/// exit code: 0 on success, 1 for invalid input or I/O failures, 2 for
/// numerical failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sjm::cli
