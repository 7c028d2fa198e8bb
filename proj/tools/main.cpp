#include "cli.hpp"

int main(int argc, char** argv) { return vrnmf::cli::run(argc, argv); }
