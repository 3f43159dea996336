#include <iostream>

#include "qcl/cli.hpp"

int main(int argc, char** argv) {
    return qcl::cli::main_entry(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
