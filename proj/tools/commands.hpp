#pragma once

// Entry point of the gcl command-line tool. Returns the process exit code:
// 0 success, 1 invalid input or flags, 2 runtime failure, 3 gradcheck failure.
namespace gcl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitCheckFailed = 3;

int run(int argc, char** argv);

}  // namespace gcl::cli
