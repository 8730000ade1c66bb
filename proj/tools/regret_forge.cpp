#include "regret_forge/bench/cli.hpp"

int main(int argc, char** argv) { return regret_forge::bench::cli_main(argc, argv); }
