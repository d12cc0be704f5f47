#include <iostream>

#include "polyfs/cli.h"

int main(int argc, char **argv) {
  return polyfs::cli::run(argc, argv, std::cout, std::cerr);
}
