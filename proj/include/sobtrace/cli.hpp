#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sobtrace {

/// Command-line front end. Returns the process exit code: 0 on success,
/// 2 on invalid input, 3 when a tolerance could not be met.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace sobtrace
