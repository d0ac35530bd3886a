#include <iostream>

#include "tachyon/cli.hpp"

int main(int argc, char** argv) { return tachyon::run_cli(argc, argv, std::cout, std::cerr); }
