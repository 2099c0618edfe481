#include "ocrnn/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ocrnn::run_cli(argc, argv, std::cout, std::cerr); }
