#include <iostream>

#include "granulex/cli.hpp"

int main(int argc, char** argv) { return granulex::cli_main(argc, argv, std::cout, std::cerr); }
