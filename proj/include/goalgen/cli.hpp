#pragma once

#include <string>
#include <vector>

namespace goalgen {

// Exit codes: 0 success, 1 run error, 2 configuration error.
int run_cli(const std::vector<std::string>& args);

}  // namespace goalgen
