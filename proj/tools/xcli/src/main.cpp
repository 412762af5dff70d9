#include <iostream>

#include "xcli/commands.hpp"

int main(int argc, char** argv) { return xcli::run_cli(argc, argv, std::cout, std::cerr); }
