#include <iostream>
#include <string>
#include <vector>

#include "latentflow/io/commands.hpp"

int main(int argc, char** argv) {
  return lf::io::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
