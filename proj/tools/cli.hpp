#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rdsync::cli {

/// Exit codes: 0 success, 1 usage error, 2 hypotheses not verified / not converged.
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_soft_failure = 2;

/// Runs one command line (argv[0] is the program name). Artifacts go to --out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rdsync::cli
