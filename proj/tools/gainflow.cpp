#include "gainflow/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return gainflow::run_cli(argc, argv, std::cout, std::cerr); }
