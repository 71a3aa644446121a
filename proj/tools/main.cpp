#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return confocal::cli::run(argc, argv, std::cout, std::cerr);
}
