#pragma once

#include <iosfwd>

namespace psdbw {

/// Parses argv, runs one subcommand and returns the process exit status:
/// 0 on success, 1 on usage or input errors, 2 on numerical/domain errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace psdbw
