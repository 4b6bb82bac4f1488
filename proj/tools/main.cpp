#include <iostream>
#include <string>
#include <vector>

#include "geomodel/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return geomodel::cli::run(args, std::cout, std::cerr);
}
