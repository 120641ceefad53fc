#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace csrpe {

/// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
int run_cli(int argc, char** argv);

/// Same as above with explicit argument list (without the program name) and
/// output streams.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csrpe
