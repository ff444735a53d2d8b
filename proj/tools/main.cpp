#include "gbcurv/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return gbcurv::cli::run(argc, argv, std::cout, std::cerr); }
