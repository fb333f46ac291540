#include "besov_ns/cli.hpp"

int main(int argc, char** argv) { return besov_ns::cli::run(argc, argv); }
