#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace railsafe {

/// Runs the `railsafe` command line. `args` excludes the program name.
/// Returns 0 on success, 1 when an operation fails, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace railsafe
