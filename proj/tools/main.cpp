#include <iostream>
#include <string>
#include <vector>

#include "plateau/harness.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return plateau::cli(args, std::cout, std::cerr);
}
