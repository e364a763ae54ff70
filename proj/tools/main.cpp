#include <iostream>

#include "rail_cli.hpp"

int main(int argc, char** argv) { return rail::cli::run(argc, argv, std::cout, std::cerr); }
