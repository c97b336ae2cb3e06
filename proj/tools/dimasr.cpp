#include <iostream>

#include "dimasr/cli/commands.hpp"

int main(int argc, char** argv) { return dimasr::cli::run_cli(argc, argv, std::cout, std::cerr); }
