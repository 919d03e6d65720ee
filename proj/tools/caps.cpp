#include "caps/cli/run.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return caps::cli::run_main(args, std::cout, std::cerr);
}
