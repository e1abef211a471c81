#include <iostream>

#include "gagliardo/cli.hpp"

int main(int argc, char** argv) { return gagliardo::cli::main(argc, argv, std::cout, std::cerr); }
