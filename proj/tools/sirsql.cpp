#include <iostream>

#include "sirsql/cli.hpp"

int main(int argc, char** argv) {
  return sirsql::run_cli({argv, argv + argc}, std::cin, std::cout, std::cerr);
}
