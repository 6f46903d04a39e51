#include "rkcca/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return rkcca::run_cli(argc, argv, std::cout, std::cerr); }
