#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ptrsrl {

enum ExitCode { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// Runs the command line `args` (args[0] is the program name) and returns the
/// process exit code. Regular output goes to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads a "key = value" config file into "--key=value" arguments. Blank
/// lines, '#' comments and "[section]" headers are skipped.
std::vector<std::string> config_arguments(const std::string& path);

}  // namespace ptrsrl
