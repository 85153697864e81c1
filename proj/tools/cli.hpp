#pragma once

#include <iosfwd>

namespace r1tc {

/// Exit codes: 0 success, 1 usage or input error, 2 numeric failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace r1tc
