#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace polqpt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Report and manifest echo schema.
inline constexpr int kReportSchemaVersion = 1;

/// Environment variable holding the default for --threads.
inline constexpr const char* kThreadsEnv = "POLQPT_THREADS";

/// Runs one `polqpt` invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on a runtime failure, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polqpt::cli
