#include <iostream>
#include <string>
#include <vector>

#include "fraudgraph/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fraudgraph::cli::run(args, std::cout, std::cerr);
}
