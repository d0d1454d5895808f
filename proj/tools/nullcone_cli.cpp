#include <iostream>

#include "nullcone/cli.hpp"

int main(int argc, char** argv) { return nullcone::cli::run(argc, argv, std::cout, std::cerr); }
