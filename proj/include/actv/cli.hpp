#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace actv {

// Runs one subcommand. `args` excludes the program name. Returns 0 on
// success, 2 on configuration or validation errors, 1 on runtime failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace actv
