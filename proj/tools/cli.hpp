#pragma once

namespace mpano {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `mpano` tool; returns the process exit status.
int cli_main(int argc, char** argv);

}  // namespace mpano
