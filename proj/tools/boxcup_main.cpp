#include <iostream>

#include "boxcup/cli.hpp"

int main(int argc, char** argv) { return boxcup::run_cli(argc, argv, std::cout, std::cerr); }
