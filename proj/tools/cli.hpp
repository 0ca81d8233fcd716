#pragma once

#include <ostream>

namespace fdyn::cli {

// Exit codes: 0 success, 1 unexpected failure, 2 validation error (bad flags,
// malformed models), 3 resolution or budget error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fdyn::cli
