#include "putwrite/cli.hpp"

int main(int argc, char** argv) { return putwrite::cli::cli_main(argc, argv); }
