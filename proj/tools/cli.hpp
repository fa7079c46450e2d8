#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ssp3d::cli {

enum ExitCode : int { ok = 0, usage = 1, data_error = 2, numerical_failure = 3 };

/// Runs the ssp3d command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "SSP3D_OUTPUT_DIR";

}  // namespace ssp3d::cli
