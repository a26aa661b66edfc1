#pragma once

#include <string>
#include <vector>

namespace qrts::cli {

// Exit codes: 0 success, 1 usage error, 2 data/validation error.
int run(const std::vector<std::string>& args);

} // namespace qrts::cli
