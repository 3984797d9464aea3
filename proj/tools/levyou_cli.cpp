#include "levyou/cli.hpp"

int main(int argc, char** argv) { return levyou::run_cli(argc, argv); }
