#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rmt::cli {

/// Runs the `rmt` command line. `args` excludes the program name. Returns
/// the process exit code: 0 success, 2 validation or io, 3 capacity,
/// 4 numerical or invariant failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rmt::cli
