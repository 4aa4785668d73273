#include "gradsat/cli.hpp"

int main(int argc, char** argv) { return gradsat::run_cli(argc, argv); }
