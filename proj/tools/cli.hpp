#pragma once

namespace sle::cli {

/// Entry point of the `sle` tool. Returns the process exit code:
/// 0 success, 1 I/O or config error, 2 validation error, 3 numeric breach.
int run(int argc, const char* const* argv);

}  // namespace sle::cli
