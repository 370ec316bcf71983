#include "amdpkit/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return amdp::run_cli(argc, argv, std::cout, std::cerr); }
