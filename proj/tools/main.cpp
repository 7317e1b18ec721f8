#include "cli.hpp"

int main(int argc, char** argv) { return mpano::cli_main(argc, argv); }
