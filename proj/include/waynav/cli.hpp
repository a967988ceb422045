#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace waynav {

/// Entry point behind the `waynav` executable. `args` excludes the program
/// name. Returns 0 on success, 1 on operational failure and 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace waynav
