#pragma once

namespace chroma::cli {

// Entry point for the chroma-assoc binary. Returns the process exit code:
// 0 on success, 2 for configuration/usage problems, 1 for runtime failures.
int run(int argc, const char* const* argv);

}  // namespace chroma::cli
