#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracwave/error.hpp"
#include "fracwave/expr.hpp"
#include "fracwave/galerkin.hpp"

namespace fracwave::config {

/// Position of a value in the config file (1-based line and byte column).
struct Location {
  std::size_t line = 0;
  std::size_t column = 0;
  std::string text;  ///< the whole source line
};

/// A config error that already carries a rendered "path:line:col: message" diagnostic.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::Config, what) {}
};

/// "path:line:col: error: what" followed by the source line and a caret marker.
std::string diagnostic(const std::string& path, const Location& where, const std::string& what,
                       std::size_t width = 1);

struct Entry {
  std::string value;
  Location where;  ///< column of the first value byte
  bool used = false;
};

/// Sections of key = value lines; '#' starts a comment, ';' too at line start.
struct IniDocument {
  std::string path;
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::map<std::string, Location> section_lines;
};

IniDocument parse_ini(const std::string& text, const std::string& path);

/// A parsed expression with the location of its source in the config file.
struct Field {
  std::string key;
  expr::Expr expr;
  Location where;

  /// Evaluates, turning expression errors into located ConfigErrors.
  double operator()(double x, double t, const std::string& path) const;
};

struct VerifyConfig {
  std::vector<std::string> checks{"coercivity", "matrix", "weak", "strong", "problem"};
  double tol_ineq = 5e-3;
  std::vector<double> coercivity_gammas{0.3, 0.5, 0.9};
  std::size_t coercivity_cases = 100;  ///< per gamma
  std::size_t coercivity_steps = 1024;
  std::vector<double> matrix_gammas{0.3, 0.5, 0.9};
  std::size_t matrix_cases = 9;
  std::size_t matrix_steps = 256;
  std::size_t matrix_modes = 3;
  std::size_t battery_size = 20;
  std::vector<double> battery_alphas{1.2, 1.5, 1.8};
  std::size_t battery_steps = 512;
  std::size_t battery_modes = 6;

  bool enabled(const std::string& check) const;
};

struct ConvergenceConfig {
  std::vector<std::size_t> time_ladder;
  std::vector<std::size_t> mode_ladder;
  std::string reference = "auto";  ///< auto | oracle | finest
  std::size_t reference_modes = 64;
};

struct ProblemConfig {
  std::string path;
  double alpha = 2.0;
  double t_max = 1.0;
  std::size_t n_steps = 0;
  std::size_t modes = 1;
  std::uint64_t seed = 1;
  galerkin::Limits limits;
  Field a, b, c, u0, u1, forcing;
  double sigma0 = 1.0;
  double sigma1 = 1.0;
  galerkin::OutputLattice lattice;
  VerifyConfig verify;
  std::optional<ConvergenceConfig> convergence;
  std::map<std::string, Location> locations;  ///< "section.key" -> value position

  galerkin::CoefficientField coefficients() const;
  /// Projected Galerkin data on the configured (or overridden) grid and mode count.
  galerkin::SpectralProblem spectral_problem(std::size_t threads, std::optional<std::size_t> n_steps = {},
                                             std::optional<std::size_t> modes = {}) const;
  /// Throws a located ConfigError.
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
};

/// Reads and validates a config file. Throws ConfigError (or Error(Io) for unreadable files).
ProblemConfig load(const std::filesystem::path& path);
ProblemConfig load_string(const std::string& text, const std::string& path);

}  // namespace fracwave::config
