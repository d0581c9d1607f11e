#include <iostream>

#include "methane/cli.hpp"

int main(int argc, char** argv) { return methane::run_cli(argc, argv, std::cout, std::cerr); }
