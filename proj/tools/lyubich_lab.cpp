#include "lyubich/cli.hpp"

int main(int argc, char** argv) { return lyubich::cli::main(argc, argv); }
