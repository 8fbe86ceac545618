#include "cmot/cli.hpp"

int main(int argc, char** argv) { return cmot::cli_main(argc, argv); }
