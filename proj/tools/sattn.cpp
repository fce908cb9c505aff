#include <iostream>

#include "sattn/cli/app.hpp"

int main(int argc, char** argv) { return sattn::cli::run(argc, argv, std::cout, std::cerr); }
