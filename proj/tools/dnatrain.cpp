#include <iostream>

#include "dna/cli.hpp"

int main(int argc, char** argv) {
  return dna::run_cli(argc, argv, std::cout, std::cerr);
}
