#include <iostream>
#include <string>
#include <vector>

#include "sysnr/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return sysnr::cli::run(args, std::cout, std::cerr);
}
