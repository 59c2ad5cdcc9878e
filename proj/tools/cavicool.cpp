#include <iostream>

#include "cavicool/cli.hpp"

int main(int argc, char** argv) {
  return cavicool::cli::run(argc, argv, std::cout, std::cerr);
}
