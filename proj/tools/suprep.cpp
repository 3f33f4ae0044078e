#include <iostream>

#include "suprep/cli.hpp"

int main(int argc, char** argv)
{
    return suprep::cli::run(argc, argv, std::cout, std::cerr);
}
