#include "nullctl/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return nullctl::cli_main(argc, argv, std::cout, std::cerr); }
