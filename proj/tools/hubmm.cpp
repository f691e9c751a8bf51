#include "hubmm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return hubmm::cli::run(argc, argv, std::cout, std::cerr);
}
