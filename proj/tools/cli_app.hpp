#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace digtree::cli {

inline constexpr const char* kToolName = "digtree";
inline constexpr const char* kToolVersion = "0.1.0";
/// Relative --out paths are resolved against this directory when set.
inline constexpr const char* kOutputDirEnv = "DIGTREE_OUTPUT_DIR";

/// Runs one command. Results go to `out` (or the --out file); failures are
/// written to `err` as a single-line JSON record. Returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace digtree::cli
