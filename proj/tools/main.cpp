#include <string>
#include <vector>

#include "statconv/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return statconv::run_cli(std::move(args));
}
