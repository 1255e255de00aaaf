#include "coex/experiments.hpp"

int main(int argc, char** argv) { return coex::run_cli(argc, argv); }
