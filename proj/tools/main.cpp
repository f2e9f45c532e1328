#include "sheq/cli.hpp"

int main(int argc, char** argv) { return sheq::cli::run(argc, argv); }
