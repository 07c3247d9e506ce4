#include <iostream>

#include "respgames/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return respgames::cli::run(args, std::cout, std::cerr);
}
