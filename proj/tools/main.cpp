#include "cli.hpp"

int main(int argc, char** argv) { return sle::cli::run(argc, argv); }
