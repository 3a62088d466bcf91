#include <iostream>

#include "qghjm/cli.hpp"

int main(int argc, char** argv) { return qghjm::run_cli(argc, argv, std::cout, std::cerr); }
