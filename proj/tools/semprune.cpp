#include <iostream>
#include <string>
#include <vector>

#include "semprune/pipeline.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return semprune::cli::run(args, std::cout, std::cerr);
}
