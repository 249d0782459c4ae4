#include <iostream>
#include <string>
#include <vector>

#include "rcnet/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rcnet::cli::run_cli(args, std::cout, std::cerr);
}
