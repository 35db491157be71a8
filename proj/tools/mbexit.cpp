#include <iostream>

#include "mbexit/cli.hpp"

int main(int argc, char** argv) { return mbexit::cli::run(argc, argv, std::cout, std::cerr); }
