// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Arguments: [suite] [seed].
#include "ricci/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    const std::string suite = argc > 1 ? argv[1] : "all";
    const unsigned seed =
        argc > 2 ? static_cast<unsigned>(std::strtoul(argv[2], nullptr, 10)) : 0;
    return ricci::cli::cmd_verify(suite, seed, std::cout);
}
