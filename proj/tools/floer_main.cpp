#include "floer/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return floer::cli::run(args, std::cout, std::cerr);
}
