#include <iostream>

#include "curvedecay/cli.hpp"

int main(int argc, char** argv) { return curvedecay::cli::run(argc, argv, std::cout, std::cerr); }
