#include "specnet/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return specnet::cli::run(argc, argv, std::cout, std::cerr);
}
