#include <iostream>
#include <string>
#include <vector>

#include "pcmon/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pcmon::cli::run(args, std::cout, std::cerr);
}
