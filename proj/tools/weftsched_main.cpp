#include "weftsched/cli.hpp"

int main(int argc, char** argv) { return weftsched::run_cli(argc, argv); }
