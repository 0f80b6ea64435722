#include <iostream>

#include "catmap/cli.hpp"

int main(int argc, char** argv) {
  return catmap::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
