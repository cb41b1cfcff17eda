#include <iostream>

#include "thermoprobe/cli.hpp"

int main(int argc, char** argv) { return thermoprobe::cli::run(argc, argv, std::cout, std::cerr); }
