#pragma once

#include <iosfwd>

namespace deepgrid {

// Exit statuses of the command-line tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_runtime_error = 3;

int cli_main(int argc, char** argv);
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace deepgrid
