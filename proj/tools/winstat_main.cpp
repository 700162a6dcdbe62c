#include "winstat/cli.hpp"

int main(int argc, char** argv) { return winstat::run_cli(argc, argv); }
