#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flatvol {

/// Exit codes: 0 success, 1 validation gate failed, 2 invalid input, 3 internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flatvol
