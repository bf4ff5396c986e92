#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace erdm::cli {

/// Runs one command line. Usage errors return 2, any other failure prints a
/// one-line diagnostic and returns 1.
int run(int argc, const char* const* argv);

/// Same, with explicit streams and arguments (argv[0] excluded).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace erdm::cli
