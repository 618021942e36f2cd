#include <iostream>

#include "hetsize/cli.hpp"

int main(int argc, char** argv) { return hetsize::run_cli(argc, argv, std::cout, std::cerr); }
