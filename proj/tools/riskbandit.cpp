#include "riskbandit/cli.hpp"

int main(int argc, char** argv) { return riskbandit::cli::main(argc, argv); }
