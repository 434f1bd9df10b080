#include <iostream>
#include <string>
#include <vector>

#include "sim6g/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sim6g::cli::run(args, std::cout, std::cerr);
}
