#include <iostream>

#include "rgnn/cli.hpp"

int main(int argc, char** argv) { return rgnn::run_cli(argc, argv, std::cout, std::cerr); }
