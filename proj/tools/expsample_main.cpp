#include <iostream>

#include "expsample/cli.hpp"

int main(int argc, char** argv) { return expsample::cli::run(argc, argv, std::cout, std::cerr); }
