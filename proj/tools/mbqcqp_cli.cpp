#include "mbqcqp/cli.hpp"

int main(int argc, char** argv) { return mbqcqp::cli_dispatch(argc, argv); }
