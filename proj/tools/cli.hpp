#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prophet::cli {

/// Runs the `prophet` command line. args excludes the program name.
/// Returns the process exit code: 0 ok, 1 other, 2 I/O, 3 version, 4 schema.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prophet::cli
