#include <iostream>

#include "pevnet/cli.hpp"

int main(int argc, char** argv) {
    return pevnet::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
