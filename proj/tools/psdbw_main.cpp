#include "psdbw/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return psdbw::run_cli(argc, argv, std::cout, std::cerr); }
