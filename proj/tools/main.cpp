#include "pctlwb/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pctlwb::run_cli(argc, argv, std::cout, std::cerr); }
