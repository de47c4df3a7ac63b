#include <iostream>

#include "vrsg/cli.hpp"

int main(int argc, char** argv) {
    return vrsg::cli::run_cli(argc, argv, std::cout, std::cerr);
}
