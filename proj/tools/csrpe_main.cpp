#include "csrpe/cli.hpp"

int main(int argc, char** argv) { return csrpe::run_cli(argc, argv); }
