#include <iostream>

#include "adsl/cli/commands.hpp"

int main(int argc, char** argv) { return adsl::cli::run_cli(argc, argv, std::cout, std::cerr); }
