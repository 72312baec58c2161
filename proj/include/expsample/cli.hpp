#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace expsample::cli {

/// Parses a list of reals: `a,b,c` or a linear range `lo:hi:n`.
std::vector<double> parse_real_list(const std::string& text);

/// Parses `p=<int>[,<int>...]`.
std::vector<int> parse_combine(const std::string& text);

/// Writes `content` to `path` via a temporary file and rename.
void write_atomically(const std::string& path, const std::string& content);

/// Entry point of the `expsample` tool. Exit status: 0 on success, 2 on flag
/// errors, 1 on numerical failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace expsample::cli
