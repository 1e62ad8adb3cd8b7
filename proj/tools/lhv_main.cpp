#include "lhv/cli.hpp"

int main(int argc, char** argv) { return lhv::run_cli(argc, argv); }
