#include <iostream>
#include <string>
#include <vector>

#include "ptrsrl/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return ptrsrl::run_cli(args, std::cout, std::cerr);
}
