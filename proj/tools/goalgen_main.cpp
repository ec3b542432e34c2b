#include <vector>

#include "goalgen/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return goalgen::run_cli(args);
}
