#include <iostream>

#include "nanoloc/cli.hpp"

int main(int argc, char** argv) { return nanoloc::run_cli(argc, argv, std::cout, std::cerr); }
