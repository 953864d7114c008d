#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trotbo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Subcommands: run, replay, analyze, bo-bench. argv[0] is the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace trotbo::cli
