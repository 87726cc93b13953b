#include <iostream>
#include <string>
#include <vector>

#include "symevol/cli.hpp"

int main(int argc, char** argv) {
  return symevol::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
