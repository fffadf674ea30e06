#include <iostream>

#include "scsim/cli.hpp"

int main(int argc, char** argv) {
  return scsim::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
