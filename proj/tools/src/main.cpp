#include <iostream>

#include "narr/cli/commands.hpp"

int main(int argc, char** argv) { return narr::cli::run_cli(argc, argv, std::cout, std::cerr); }
