#include <iostream>
#include <string>
#include <vector>

#include "afdo/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return afdo::cli::run_command(args, std::cout, std::cerr);
}
