#include <iostream>

#include "actv/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return actv::run(args, std::cout, std::cerr);
}
