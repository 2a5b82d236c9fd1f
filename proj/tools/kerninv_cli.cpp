#include "kerninv/runner.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kerninv::run_cli(args, std::cout, std::cerr);
}
