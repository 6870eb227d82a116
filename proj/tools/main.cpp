#include <string>
#include <vector>

#include "proxctl/cli.hpp"

int main(int argc, char** argv) {
  return proxctl::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
