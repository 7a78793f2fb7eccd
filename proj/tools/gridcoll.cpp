#include <iostream>
#include <string>
#include <vector>

#include "gridcoll/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return gridcoll::run_cli(args, std::cout, std::cerr);
}
