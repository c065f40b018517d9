#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nmm {

/// Entry point of the newton-minmax command line tool. Returns 0 on success,
/// 1 when a solver aborts or output cannot be written, 2 on a configuration
/// or usage error.
int cli_main(int argc, const char* const* argv);
/// `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The invariant suite behind `newton-minmax check`; prints one line per
/// fixture and returns true when every check passes.
bool run_check_suite(std::ostream& out);

}  // namespace nmm
