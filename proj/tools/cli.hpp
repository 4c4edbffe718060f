#pragma once

#include <ostream>

namespace stpls::cli {

/// Entry point of the `stpls` tool: fit | predict | cv | simulate | compare.
/// Returns the process exit status; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stpls::cli
