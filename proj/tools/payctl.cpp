#include <iostream>
#include <string>
#include <vector>

#include "payctl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return payctl::run_command(args, std::cout, std::cerr);
}
