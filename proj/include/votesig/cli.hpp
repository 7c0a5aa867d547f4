#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace votesig {

// Full command-line front end.  Returns the process exit code:
// 0 success, 2 validation/usage errors, 3 infeasibility or precision
// exhaustion reports.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace votesig
