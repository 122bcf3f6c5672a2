#include <iostream>

#include "contacttrees/cli.hpp"

int main(int argc, char** argv) {
  return contacttrees::cli::run(argc, argv, std::cout, std::cerr);
}
