#include <iostream>

#include "optcs/cli/commands.hpp"

int main(int argc, char** argv) { return optcs::cli::run_cli(argc, argv, std::cerr); }
