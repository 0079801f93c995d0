#include <iostream>
#include <string>
#include <vector>

#include "censornet/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return censornet::cli::run_cli(args, std::cout, std::cerr);
}
