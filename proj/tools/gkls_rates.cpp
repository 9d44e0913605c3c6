#include <iostream>

#include "gkls/cli.hpp"

int main(int argc, char** argv) { return gkls::cli::run(argc, argv, std::cout, std::cerr); }
