#include <iostream>
#include <string>
#include <vector>

#include "sjm/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return sjm::cli::run(args, std::cout, std::cerr);
}
