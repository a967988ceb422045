#include <iostream>

#include "waynav/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return waynav::run_cli(args, std::cout, std::cerr);
}
