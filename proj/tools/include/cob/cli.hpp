#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cob::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;  // usage, configuration or data error
inline constexpr int kExitIo = 3;

/// Runs the command line `args` (without the program name).
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Run directories below `path`: the path itself when it holds a manifest,
/// otherwise its immediate subdirectories that do, sorted by name.
std::vector<std::filesystem::path> discover_runs(const std::filesystem::path& path);

/// Writes the analysis tables and summary.txt for the given runs into `out_dir`.
/// Returns the summary text.
std::string analyze(const std::vector<std::filesystem::path>& runs, const std::filesystem::path& out_dir);

}  // namespace cob::cli
