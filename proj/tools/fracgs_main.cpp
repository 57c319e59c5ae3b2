#include "fracgs/cli.hpp"

int main(int argc, char** argv) { return fracgs::run_command(argc, argv); }
