#include <iostream>

#include "grar/cli.hpp"

int main(int argc, char** argv) {
    return grar::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
