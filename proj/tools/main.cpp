#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return r1tc::run_cli(argc, argv, std::cout, std::cerr); }
