#include <iostream>

#include "mgd/harness.hpp"

int main(int argc, char** argv) { return mgd::cli_main(argc, argv, std::cout, std::cerr); }
