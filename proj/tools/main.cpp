#include "masspart/harness.hpp"

int main(int argc, char** argv) { return masspart::harness::run_cli(argc, argv); }
