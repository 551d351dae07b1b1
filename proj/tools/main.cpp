#include "pmod/cli.hpp"

int main(int argc, char** argv) { return pmod::run_cli(argc, argv); }
