#include "cavmem/cli.hpp"

int main(int argc, char** argv) { return cavmem::run_cli(argc, argv); }
