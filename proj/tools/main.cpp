#include "commands.hpp"

int main(int argc, char **argv) { return nlsf::cli::run(argc, argv); }
