#include "pflab/runner.hpp"

int main(int argc, char** argv) { return pflab::run_cli(argc, argv); }
