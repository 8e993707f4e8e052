#include <iostream>

#include "fracdiff/cli.hpp"

int main(int argc, char** argv) { return fracdiff::cli::main(argc, argv, std::cout, std::cerr); }
