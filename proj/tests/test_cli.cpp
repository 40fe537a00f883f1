#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "fracwave/cli.hpp"
#include "fracwave/config.hpp"
#include "fracwave/special.hpp"

using namespace fracwave;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = FRACWAVE_SOURCE_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fracwave_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Result run(cli::Command command, const fs::path& config, const fs::path& out,
           std::optional<std::size_t> threads = 1) {
  cli::RunOptions o;
  o.command = command;
  o.config = config;
  o.out_dir = out;
  o.threads = threads;
  std::ostringstream so, se;
  const int code = cli::run(o, so, se);
  return {code, so.str(), se.str()};
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "problem.ini";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

const char* kSmall = R"(
[problem]
alpha = 1.5
n_steps = 64
modes = 2

[coefficients]
a = 1
sigma0 = 1
sigma1 = 1

[data]
u0 = sin(pi*x)
)";

std::string config_error(const std::string& text) {
  try {
    config::load_string(text, "p.ini");
  } catch (const config::ConfigError& e) {
    return e.what();
  }
  FAIL("expected a ConfigError");
  return {};
}

}  // namespace

TEST_CASE("config: defaults and resolved values") {
  const auto cfg = config::load_string(kSmall, "p.ini");
  CHECK(cfg.alpha == 1.5);
  CHECK(cfg.t_max == 1.0);
  CHECK(cfg.modes == 2);
  CHECK(cfg.b.expr.source() == "0");
  CHECK_FALSE(cfg.coefficients().time_dependent);
  CHECK(cfg.verify.tol_ineq == 5e-3);
  CHECK_FALSE(cfg.convergence.has_value());
}

TEST_CASE("config: diagnostics name line and column") {
  std::string text = kSmall;
  text.replace(text.find("u0 = sin(pi*x)"), 14, "u0 = sin(pi*y)");
  const std::string msg = config_error(text);
  CHECK(msg.find("p.ini:13:13: error: unknown identifier 'y'") == 0);
  CHECK(msg.find("  u0 = sin(pi*y)\n              ^") != std::string::npos);

  CHECK(config_error(std::string(kSmall) + "bogus = 1\n").find("unknown key 'bogus'") != std::string::npos);
  CHECK(config_error(std::string(kSmall) + "u0 = x\n").find("duplicate key") != std::string::npos);
  CHECK(config_error("[problem]\nalpha = 2.5\nn_steps = 8\n").find("p.ini:2:9: error: alpha must lie in (1, 2]") == 0);
  CHECK(config_error("[problem]\nalpha = 1.5\n").find("missing required key 'n_steps'") != std::string::npos);
  CHECK(config_error("[problme]\n").find("unknown section") != std::string::npos);
  CHECK(config_error(std::string(kSmall) + "[data]\n").find("duplicate section") != std::string::npos);
  CHECK(config_error(std::string(kSmall) + "[convergence]\ntime_ladder = 64\n").find("at least two levels") !=
        std::string::npos);
  CHECK(config_error(std::string(kSmall) + "[convergence]\ntime_ladder = 64, 96\n").find("divide") !=
        std::string::npos);

  std::string tdep = kSmall;
  tdep.replace(tdep.find("u0 = sin(pi*x)"), 14, "u0 = t");
  CHECK(config_error(tdep).find("x only") != std::string::npos);
}

TEST_CASE("config: declared ellipticity bounds are checked") {
  std::string text = kSmall;
  text.replace(text.find("\na = 1") + 1, 5, "a = 1 + 0.5*x");
  const std::string msg = config_error(text);
  CHECK(msg.find("p.ini:8:5: error: coefficients.a") == 0);
}

TEST_CASE("format_double is the shortest round trip") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e22, std::numbers::pi}) {
    const std::string s = cli::format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(cli::format_double(0.1) == "0.1");
  CHECK(cli::format_double(-1.0) == "-1");
}

TEST_CASE("threads: option, environment and errors") {
  CHECK(cli::resolve_threads(3) == 3);
  CHECK_THROWS_AS(cli::resolve_threads(0), Error);
  ::setenv("FRACWAVE_THREADS", "2", 1);
  CHECK(cli::resolve_threads(std::nullopt) == 2);
  CHECK(cli::resolve_threads(5) == 5);
  ::setenv("FRACWAVE_THREADS", "two", 1);
  CHECK_THROWS_AS(cli::resolve_threads(std::nullopt), Error);
  const auto dir = scratch("env");
  const auto r = run(cli::Command::Solve, write_config(dir, kSmall), dir / "out", std::nullopt);
  CHECK(r.code == cli::kConfigError);
  CHECK(r.err.find("FRACWAVE_THREADS") != std::string::npos);
  ::unsetenv("FRACWAVE_THREADS");
  CHECK(cli::resolve_threads(std::nullopt) >= 1);
}

TEST_CASE("solve: wave limit config matches cos(pi t) sin(pi x)") {
  const auto dir = scratch("wave");
  const auto r = run(cli::Command::Solve, kSource / "configs/wave_limit.ini", dir);
  REQUIRE(r.code == 0);
  const auto rows = read_csv(dir / "field.csv");
  bool found = false;
  double worst = 0.0;
  for (const auto& row : rows) {
    const double exact = std::cos(std::numbers::pi * row[0]) * std::sin(std::numbers::pi * row[1]);
    worst = std::max(worst, std::fabs(row[2] - exact));
    if (row[0] == 1.0 && row[1] == 0.5) {
      found = true;
      CHECK(row[2] == doctest::Approx(-1.0).epsilon(1e-3));
    }
  }
  CHECK(found);
  CHECK(worst <= 1e-3);
  for (const char* f : {"field.csv", "coeffs.csv", "norms.json", "run.json", "timings.json"})
    CHECK(fs::exists(dir / f));
  CHECK(slurp(dir / "run.json").find("\"parsed\": \"sin((pi * x))\"") != std::string::npos);
}

TEST_CASE("solve: ML benchmark coefficient column") {
  const auto dir = scratch("ml");
  REQUIRE(run(cli::Command::Solve, kSource / "configs/ml_benchmark.ini", dir).code == 0);
  double worst = 0.0;
  for (const auto& row : read_csv(dir / "coeffs.csv")) {
    const double z = -std::numbers::pi * std::numbers::pi * std::pow(row[0], 1.5);
    worst = std::max(worst, std::fabs(row[1] - mittag_leffler(1.5, z)));
  }
  CHECK(worst <= 5e-3);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  auto r = run(cli::Command::Solve, dir / "missing.ini", dir / "out");
  CHECK(r.code == cli::kConfigError);
  CHECK(r.err.find("missing.ini") != std::string::npos);

  std::string coarse = kSmall;
  coarse.replace(coarse.find("modes = 2"), 9, "modes = 40");
  coarse.replace(coarse.find("n_steps = 64"), 12, "n_steps = 16");
  r = run(cli::Command::Solve, write_config(dir, coarse), dir / "out");
  CHECK(r.code == cli::kNumericalFailure);
  CHECK(r.err.find("hint: rerun with n_steps >= ") != std::string::npos);

  std::string capped = kSmall;
  capped.replace(capped.find("modes = 2"), 9, "modes = 300");
  r = run(cli::Command::Solve, write_config(dir, capped), dir / "out");
  CHECK(r.code == cli::kNumericalFailure);

  std::string singular = kSmall;
  singular.replace(singular.find("u0 = sin(pi*x)"), 14, "u0 = 1/(x-x)");
  r = run(cli::Command::Solve, write_config(dir, singular), dir / "out");
  CHECK(r.code == cli::kConfigError);
  CHECK(r.err.find("division by zero") != std::string::npos);
  CHECK(r.err.find("problem.ini:13:6:") != std::string::npos);

  r = run(cli::Command::Convergence, write_config(dir, kSmall), dir / "out");
  CHECK(r.code == cli::kConfigError);
}

TEST_CASE("verify: hypothesis gate and tampered tolerance") {
  const auto dir = scratch("verify");
  auto r = run(cli::Command::Verify, kSource / "tests/configs/incompatible.ini", dir / "a");
  CHECK(r.code == 0);
  CHECK(r.err.find("warning: 1 witness(es) not applicable") != std::string::npos);
  CHECK(slurp(dir / "a/witnesses.json").find("\"not-applicable\"") != std::string::npos);

  r = run(cli::Command::Verify, kSource / "tests/configs/compatible.ini", dir / "b");
  CHECK(r.code == 0);
  CHECK(r.err.empty());

  r = run(cli::Command::Verify, kSource / "tests/configs/tampered.ini", dir / "c");
  CHECK(r.code == cli::kVerificationFailed);
  CHECK(r.out.find("verify: FAILED") != std::string::npos);
}

TEST_CASE("convergence: ML ladder order and mode ladder decay") {
  const auto dir = scratch("conv");
  REQUIRE(run(cli::Command::Convergence, kSource / "configs/ml_benchmark.ini", dir).code == 0);
  const std::string csv = slurp(dir / "convergence.csv");
  CHECK(csv.rfind("ladder,n_steps,modes,error,order,flag\n", 0) == 0);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.find(",ok") != std::string::npos);
    const auto parts = [&] {
      std::vector<std::string> p;
      std::stringstream ss(line);
      std::string c;
      while (std::getline(ss, c, ',')) p.push_back(c);
      return p;
    }();
    if (!parts[4].empty()) CHECK(std::stod(parts[4]) >= 1.8);
  }
  CHECK(rows == 4);
}

TEST_CASE("artifacts are byte-identical across repeats and thread counts") {
  const auto dir = scratch("determinism");
  const auto cfg = kSource / "configs/variable_battery.ini";
  REQUIRE(run(cli::Command::Solve, cfg, dir / "a", 1).code == 0);
  REQUIRE(run(cli::Command::Solve, cfg, dir / "b", 1).code == 0);
  REQUIRE(run(cli::Command::Solve, cfg, dir / "c", 3).code == 0);
  for (const char* f : {"field.csv", "coeffs.csv", "norms.json", "run.json"}) {
    CAPTURE(f);
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    CHECK(slurp(dir / "a" / f) == slurp(dir / "c" / f));
  }
  CHECK_FALSE(fs::exists(dir / "a/field.csv.tmp"));
}
