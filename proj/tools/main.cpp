#include "convml/cli.hpp"

int main(int argc, char** argv) { return convml::cli::run(argc, argv); }
