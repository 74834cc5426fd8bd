#include "preyswitch/cli.hpp"

int main(int argc, char** argv) { return preyswitch::run_command(argc, argv); }
