#pragma once

#include <iosfwd>

namespace amdp {

/// Entry point of the `amdpkit` command line tool.
///
/// Exit codes: 0 on success, 1 on usage errors, 2 on runtime errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace amdp
