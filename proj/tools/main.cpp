#include <iostream>

#include "medmarg_cli/app.hpp"

int main(int argc, char** argv) { return medmarg::cli::main_entry(argc, argv, std::cout, std::cerr); }
