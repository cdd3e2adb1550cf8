#include "gddp/cli.hpp"

int main(int argc, char** argv) { return gddp::cli::run(argc, argv); }
