#include "wibench/cli.hpp"

int main(int argc, char** argv) { return wibench::cli::run_cli(argc, argv); }
