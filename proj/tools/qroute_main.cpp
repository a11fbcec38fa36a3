#include "qroute/cli.hpp"

int main(int argc, char** argv) { return qroute::cli_entry(argc, argv); }
