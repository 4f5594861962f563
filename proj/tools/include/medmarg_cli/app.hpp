#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "medmarg_cli/run_spec.hpp"

namespace medmarg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

// Parses flags, an optional --config key=value file and MEDMARG_OUT_DIR into
// `spec`. Returns an exit status when the program should stop (help shown or
// usage error), nullopt when `spec` is ready to run.
std::optional<int> parse_command_line(int argc, const char* const* argv, RunSpec& spec, std::ostream& out,
                                      std::ostream& err);

// One-paragraph usage summary printed with usage errors.
std::string synopsis();

// Executes a parsed RunSpec; writes artifacts under spec.out_dir.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace medmarg::cli
