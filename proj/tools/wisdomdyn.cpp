#include <iostream>

#include "wisdomdyn/cli.hpp"

int main(int argc, char** argv) { return wisdomdyn::run_cli(argc, argv, std::cout, std::cerr); }
