#include <iostream>

#include "jumpstab/runner/runner.hpp"

int main(int argc, char** argv) {
  return jumpstab::runner::run_cli(argc, argv, std::cout, std::cerr);
}
