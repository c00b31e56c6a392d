#pragma once

// Command-line front end. Parsing and dispatch live here so tests can drive
// them without spawning a process.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "radfrac/radial_function.hpp"

namespace radfrac::cli {

enum class Command { Constants, Integrate, ApplyD, ApplyI, Solve, Residual, Verify };
enum class Format { Json, Csv };

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidation = 1;
inline constexpr int kSolver = 2;
inline constexpr int kVerification = 3;

struct RunConfig {
  Command command = Command::Constants;
  std::optional<int> q;
  std::optional<double> alpha;
  std::optional<int> n_min;
  std::optional<int> n_max;
  std::vector<std::string> inputs;  // solve: a, f; residual: a, f, u
  std::string output;               // empty: standard output
  /// Unset means JSON, except for `verify`, which then prints one line per
  /// criterion.
  std::optional<Format> format;
  int dim = 1;
  /// Scalar u0, or the same value for every component in matrix mode
  /// unless a config file gives a list.
  std::vector<cd> u0;
  std::optional<double> pivot_tolerance;  // --tol
};

Command parse_command(const std::string& name);
std::string command_name(Command c);

/// Flags over an optional JSON config file (--config); flags win. Throws
/// ValidationError on bad values; CLI::ParseError escapes for help/usage.
RunConfig parse_args(int argc, const char* const* argv);

/// Dispatches one command. Never throws; errors go to `err` and map to the
/// exit codes above.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run, with usage errors reported as exit code 1.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace radfrac::cli
