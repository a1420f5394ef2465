#include "sla4oai/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return sla4oai::run_main(argc, argv, std::cout, std::cerr);
}
