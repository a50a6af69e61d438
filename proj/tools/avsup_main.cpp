#include "avsup/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return avsup::cli::main(argc, argv, std::cout, std::cerr);
}
