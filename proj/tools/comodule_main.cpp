#include <string>
#include <vector>

#include "comodule/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return comodule::run_cli(args);
}
