#include <iostream>
#include <string>
#include <vector>

#include "antigone/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return antigone::cli::run(args, std::cout, std::cerr);
}
