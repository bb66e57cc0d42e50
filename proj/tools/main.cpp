#include "cli/cli.hpp"

int main(int argc, char** argv) {
  return claws::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
