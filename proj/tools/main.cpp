#include "cli/commands.hpp"

int main(int argc, char** argv) { return tsvdtd::cli::cli_main(argc, argv); }
