#include <iostream>

#include "gradstorm/cli.hpp"

int main(int argc, char** argv) { return gradstorm::cli::run(argc, argv, std::cout, std::cerr); }
