#include <iostream>

#include "statemon/cli.hpp"

int main(int argc, char** argv) {
  return statemon::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
