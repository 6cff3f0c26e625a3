#include <iostream>

#include "locdb/cli.hpp"

int main(int argc, char** argv) { return locdb::run_cli(argc, argv, std::cout, std::cerr); }
