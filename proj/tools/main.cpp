#include "tofgraph/cli.hpp"

int main(int argc, char** argv) { return tofgraph::cli_main(argc, argv); }
