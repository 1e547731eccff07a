#include "cli.hpp"

int main(int argc, char** argv) { return trajbench::tools::run_cli(argc, argv); }
