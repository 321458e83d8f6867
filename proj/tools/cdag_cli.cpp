#include <iostream>
#include <string>
#include <vector>

#include "cdag/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cdag::cli::run(args, std::cout, std::cerr);
}
