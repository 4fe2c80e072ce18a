#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace consist::cli {

/// Entry point of the `consist` tool. `args` excludes the program name.
/// Returns the process exit status (0 ok, 1 failure, 2 missing input, 64 usage).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace consist::cli
