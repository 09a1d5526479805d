#include "nds/cli/cli.hpp"

int main(int argc, char** argv) { return nds::cli::run_cli(argc, argv); }
