#include <iostream>

#include "tailest/cli_io.hpp"

int main(int argc, char** argv) {
    return tailest::run_cli(argc, argv, std::cout, std::cerr);
}
