#pragma once

#include <iostream>

namespace preyswitch {

/// Entry point of the command-line tool. Returns 0 on success, 1 on a
/// library error (its kind name is printed first on `err`), 2 on bad usage.
int run_command(int argc, const char* const* argv, std::ostream& out = std::cout,
                std::ostream& err = std::cerr);

}  // namespace preyswitch
