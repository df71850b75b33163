#include "dwell/cli.hpp"

int main(int argc, char** argv) { return dwell::run_cli(argc, argv); }
