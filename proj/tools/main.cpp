#include <iostream>

#include "specgen/cli.hpp"

int main(int argc, char** argv) {
    return specgen::run_cli(argc, argv, std::cout, std::cerr);
}
