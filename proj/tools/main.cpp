#include <iostream>

#include "geotrace/cli.hpp"

int main(int argc, char** argv) {
  return geotrace::run_cli(argc, argv, std::cout, std::cerr);
}
