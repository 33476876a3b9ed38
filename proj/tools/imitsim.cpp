#include <iostream>

#include "imitate/cli.hpp"

int main(int argc, char** argv) { return imitate::run_cli(argc, argv, std::cout, std::cerr); }
