#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdag::cli {

// Exit codes: 0 success, 1 input or usage error, 2 numeric failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdag::cli
