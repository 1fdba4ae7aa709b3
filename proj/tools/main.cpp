#include <iostream>

#include "bosoncpa/cli.hpp"

int main(int argc, char** argv) {
  return bosoncpa::run_cli(argc, argv, std::cout, std::cerr);
}
