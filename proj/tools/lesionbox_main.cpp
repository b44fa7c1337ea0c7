#include "lesionbox/cli.hpp"

int main(int argc, char** argv) { return lesionbox::cli::run_cli(argc, argv); }
