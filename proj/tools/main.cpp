#include "cli.hpp"

int main(int argc, char** argv) { return longtie::cli::run(argc, argv); }
