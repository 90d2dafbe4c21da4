#include "augrec/cli/commands.hpp"

int main(int argc, char** argv) { return augrec::run_command(argc, argv); }
