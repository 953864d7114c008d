#include "trotbo/cli.hpp"

int main(int argc, char** argv) { return trotbo::cli::cli_main(argc, argv); }
