#pragma once

namespace cavmem {

// Command-line entry point (the `cavmem` binary is a thin wrapper).
// Exit codes: 0 success, 2 usage error, 3 I/O error, 4 numerical failure.
int run_cli(int argc, const char* const* argv);

}  // namespace cavmem
