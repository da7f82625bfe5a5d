#include <iostream>

#include "hardhex/cli.hpp"

int main(int argc, char** argv) { return hardhex::cli::dispatch(argc, argv, std::cout, std::cerr); }
