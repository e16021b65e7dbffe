#include <iostream>
#include <string>
#include <vector>

#include "kerr_otto/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kerr_otto::cli::run(std::move(args), std::cout, std::cerr);
}
