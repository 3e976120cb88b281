#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
    return pmiembed::cli::dispatch({argv, argv + argc}, std::cout, std::cerr);
}
