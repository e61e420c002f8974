#include <iostream>

#include "flownet/cli.hpp"

int main(int argc, char** argv) { return flownet::run_cli(argc, argv, std::cout, std::cerr); }
