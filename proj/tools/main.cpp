#include <iostream>

#include "scalebreak/cli.hpp"

int main(int argc, char** argv) { return scalebreak::run_cli(argc, argv, std::cout, std::cerr); }
