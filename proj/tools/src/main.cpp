#include <iostream>
#include <string>
#include <vector>

#include "gqt_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return gqt::cli::run(args, std::cout, std::cerr);
}
