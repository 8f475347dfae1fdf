#include "evauth/cli.hpp"

int main(int argc, char** argv) { return evauth::cli::run(argc, argv); }
