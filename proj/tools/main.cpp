#include "circenv/cli.hpp"

int main(int argc, char** argv) { return circenv::run_cli(std::vector<std::string>(argv, argv + argc)); }
