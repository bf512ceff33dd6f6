#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gutmanlab::cli {

// Parses and runs one command line (without the program name). Results go to
// out, diagnostics to err. Returns the process exit status: 0 on success, 2
// on configuration errors, 3 on numeric or domain errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gutmanlab::cli
