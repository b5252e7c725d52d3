#include <iostream>

#include "clinduct/cli.hpp"

int main(int argc, char** argv) { return clinduct::run_cli(argc, argv, std::cout, std::cerr); }
