#include "roughstat/cli/run.hpp"

int main(int argc, char** argv) { return roughstat::cli::main(argc, argv); }
