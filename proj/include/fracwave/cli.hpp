#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace fracwave::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kConfigError = 2, kNumericalFailure = 3 };

enum class Command { Solve, Verify, Convergence };

struct RunOptions {
  Command command = Command::Solve;
  std::filesystem::path config;
  std::filesystem::path out_dir = "out";
  std::optional<std::size_t> threads;  ///< falls back to FRACWAVE_THREADS, then hardware concurrency
  std::optional<std::uint64_t> seed;   ///< overrides problem.seed
};

/// Runs one command; every error is reported on `err` and mapped to an exit code.
int run(const RunOptions& options, std::ostream& out, std::ostream& err);

/// Resolves the worker count from the option and the environment; throws Error(Config) on bad values.
std::size_t resolve_threads(std::optional<std::size_t> requested);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fracwave::cli
