#include <iostream>

#include "pgpce/cli/commands.hpp"

int main(int argc, char** argv) {
  return pgpce::cli::run_cli(argc, argv, std::cout, std::cerr);
}
