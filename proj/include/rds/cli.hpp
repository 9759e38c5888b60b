#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rds {

/// Entry point of the `rdslab` tool. Returns the process exit status; errors
/// print one diagnostic line to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rds
