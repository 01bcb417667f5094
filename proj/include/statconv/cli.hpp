#pragma once

#include <string>
#include <vector>

namespace statconv {

/// Command driver behind the statconv binary. `args` excludes the program
/// name. Returns 0 on success, 1 on a validation error (bad flags, config
/// schema, inconsistent inputs), 2 on a runtime failure.
int run_cli(std::vector<std::string> args);

}  // namespace statconv
