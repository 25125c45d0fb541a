#include <iostream>
#include <string>
#include <vector>

#include "dsgen/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dsgen::cli::dispatch(args, std::cout, std::cerr);
}
