#include "vrmhd/io.hpp"

int main(int argc, char** argv) { return vrmhd::cli_main(argc, argv); }
