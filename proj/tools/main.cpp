#include "cli.hpp"

int main(int argc, char** argv) { return nsar::cli::run(argc, argv); }
