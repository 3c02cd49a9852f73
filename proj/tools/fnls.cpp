#include "fnls/cli.hpp"

int main(int argc, char** argv) { return fnls::run_command(argc, argv); }
