#include "gaitid/cli.hpp"

int main(int argc, char** argv) { return gaitid::cli::main(argc, argv); }
