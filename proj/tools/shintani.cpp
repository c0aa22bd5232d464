#include <iostream>
#include <string>
#include <vector>

#include "shintani/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return shintani::cli::run(args, std::cout, std::cerr);
}
