#include <iostream>

#include "sigmaproof/cli.hpp"

int main(int argc, char** argv) { return sigmaproof::run_cli(argc, argv, std::cout, std::cerr); }
