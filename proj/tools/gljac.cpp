#include <iostream>

#include "gljac/cli.hpp"

int main(int argc, char** argv) { return gljac::cli::run(argc, argv, std::cout, std::cerr); }
