#include "fracwave/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace fracwave::config {
namespace {

std::string trim(std::string_view s, std::size_t* offset = nullptr) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  if (offset) *offset = b;
  return std::string(s.substr(b, e - b));
}

bool valid_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

// Allowed keys per section; anything else is reported as a probable typo.
const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"problem", {"alpha", "T", "n_steps", "modes", "seed", "max_modes", "max_steps"}},
      {"coefficients", {"a", "b", "c", "sigma0", "sigma1"}},
      {"data", {"u0", "u1", "F"}},
      {"output", {"x_nodes", "t_stride"}},
      {"verify",
       {"checks", "tol_ineq", "coercivity_gammas", "coercivity_cases", "coercivity_steps", "matrix_gammas",
        "matrix_cases", "matrix_steps", "matrix_modes", "battery_size", "battery_alphas", "battery_steps",
        "battery_modes"}},
      {"convergence", {"time_ladder", "mode_ladder", "reference", "reference_modes"}},
  };
  return s;
}

class Reader {
 public:
  explicit Reader(IniDocument& doc) : doc_(doc) {}

  const Entry* find(const std::string& section, const std::string& key) {
    auto s = doc_.sections.find(section);
    if (s == doc_.sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }

  [[noreturn]] void fail(const Entry& e, const std::string& what) const {
    throw ConfigError(diagnostic(doc_.path, e.where, what, std::max<std::size_t>(1, e.value.size())));
  }

  [[noreturn]] void missing(const std::string& section, const std::string& key) const {
    std::ostringstream msg;
    msg << doc_.path << ": error: missing required key '" << key << "' in section [" << section << "]";
    throw ConfigError(msg.str());
  }

  double number(const Entry& e, std::string_view text) const {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
      fail(e, "expected a finite number, found '" + std::string(text) + "'");
    return v;
  }

  std::uint64_t integer(const Entry& e, std::string_view text) const {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
      fail(e, "expected a non-negative integer, found '" + std::string(text) + "'");
    return v;
  }

  double real(const std::string& section, const std::string& key, std::optional<double> fallback) {
    const Entry* e = find(section, key);
    if (!e) {
      if (!fallback) missing(section, key);
      return *fallback;
    }
    return number(*e, e->value);
  }

  std::uint64_t count(const std::string& section, const std::string& key, std::optional<std::uint64_t> fallback,
                      std::uint64_t min = 0) {
    const Entry* e = find(section, key);
    if (!e) {
      if (!fallback) missing(section, key);
      return *fallback;
    }
    const auto v = integer(*e, e->value);
    if (v < min) fail(*e, "'" + key + "' must be at least " + std::to_string(min));
    return v;
  }

  std::vector<std::string> items(const Entry& e) const {
    std::vector<std::string> out;
    std::string_view rest = e.value;
    for (;;) {
      const auto comma = rest.find(',');
      const std::string item = trim(rest.substr(0, comma));
      if (item.empty()) fail(e, "empty item in list");
      out.push_back(item);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return out;
  }

  std::vector<double> reals(const std::string& section, const std::string& key, std::vector<double> fallback) {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    std::vector<double> out;
    for (const auto& item : items(*e)) out.push_back(number(*e, item));
    return out;
  }

  std::vector<std::size_t> counts(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return {};
    std::vector<std::size_t> out;
    for (const auto& item : items(*e)) out.push_back(integer(*e, item));
    return out;
  }

  Field field(const std::string& section, const std::string& key, const std::string& fallback) {
    const Entry* e = find(section, key);
    Field f;
    f.key = section + "." + key;
    if (!e) {
      f.expr = expr::parse(fallback);
      return f;
    }
    f.where = e->where;
    try {
      f.expr = expr::parse(e->value);
    } catch (const SpanError& err) {
      Location at = e->where;
      at.column += err.span().start;
      throw ConfigError(diagnostic(doc_.path, at, err.what(),
                                   std::max<std::size_t>(1, err.span().end - err.span().start)));
    }
    return f;
  }

  void reject_unused() const {
    for (const auto& [section, entries] : doc_.sections)
      for (const auto& [key, entry] : entries)
        if (!entry.used) fail(entry, "unknown key '" + key + "' in section [" + section + "]");
  }

 private:
  IniDocument& doc_;
};

}  // namespace

std::string diagnostic(const std::string& path, const Location& where, const std::string& what,
                       std::size_t width) {
  std::ostringstream out;
  out << path << ':' << where.line << ':' << where.column << ": error: " << what;
  if (!where.text.empty()) {
    out << "\n  " << where.text << "\n  " << std::string(where.column > 0 ? where.column - 1 : 0, ' ') << '^';
    if (width > 1) out << std::string(width - 1, '~');
  }
  return out.str();
}

IniDocument parse_ini(const std::string& text, const std::string& path) {
  IniDocument doc;
  doc.path = path;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t lead = 0;
    const std::string content = trim(line, &lead);
    if (content.empty() || content[0] == ';') continue;
    const Location here{line_no, lead + 1, raw};
    auto fail_here = [&](const std::string& what) {
      throw ConfigError(diagnostic(path, here, what, content.size()));
    };
    if (content.front() == '[') {
      if (content.back() != ']') fail_here("section header must end with ']'");
      section = trim(std::string_view(content).substr(1, content.size() - 2));
      if (!schema().count(section)) fail_here("unknown section [" + section + "]");
      if (doc.section_lines.count(section)) fail_here("duplicate section [" + section + "]");
      doc.section_lines[section] = here;
      doc.sections[section];
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) fail_here("expected 'key = value'");
    if (section.empty()) fail_here("key outside of any section");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    if (!valid_name(key)) fail_here("invalid key name '" + key + "'");
    if (!schema().at(section).count(key)) fail_here("unknown key '" + key + "' in section [" + section + "]");
    std::size_t value_lead = 0;
    const std::string value = trim(std::string_view(content).substr(eq + 1), &value_lead);
    Location where{line_no, lead + eq + 1 + value_lead + 1, raw};
    if (value.empty()) throw ConfigError(diagnostic(path, where, "empty value for '" + key + "'"));
    if (doc.sections[section].count(key))
      throw ConfigError(diagnostic(path, Location{line_no, lead + 1, raw}, "duplicate key '" + key + "'",
                                   key.size()));
    doc.sections[section][key] = Entry{value, where, false};
  }
  return doc;
}

double Field::operator()(double x, double t, const std::string& path) const {
  try {
    return expr(x, t);
  } catch (const SpanError& err) {
    Location at = where;
    if (at.line > 0) at.column += err.span().start;
    std::string what = key + ": " + err.what();
    if (at.line == 0) throw ConfigError(path + ": error: " + what);
    throw ConfigError(diagnostic(path, at, what, std::max<std::size_t>(1, err.span().end - err.span().start)));
  }
}

bool VerifyConfig::enabled(const std::string& check) const {
  return std::find(checks.begin(), checks.end(), check) != checks.end();
}

galerkin::CoefficientField ProblemConfig::coefficients() const {
  galerkin::CoefficientField out;
  out.a = [f = a, p = path](double x, double t) { return f(x, t, p); };
  out.b = [f = b, p = path](double x, double t) { return f(x, t, p); };
  out.c = [f = c, p = path](double x, double t) { return f(x, t, p); };
  out.sigma0 = sigma0;
  out.sigma1 = sigma1;
  out.time_dependent = a.expr.depends_on_t() || b.expr.depends_on_t() || c.expr.depends_on_t();
  return out;
}

galerkin::SpectralProblem ProblemConfig::spectral_problem(std::size_t threads, std::optional<std::size_t> steps,
                                                          std::optional<std::size_t> mode_count) const {
  const TimeGrid grid(t_max, steps.value_or(n_steps));
  return galerkin::SpectralProblem::build(
      alpha, grid, mode_count.value_or(modes), coefficients(),
      [f = u0, p = path](double x) { return f(x, 0.0, p); }, [f = u1, p = path](double x) { return f(x, 0.0, p); },
      [f = forcing, p = path](double x, double t) { return f(x, t, p); }, limits, threads);
}

void ProblemConfig::fail(const std::string& key, const std::string& what) const {
  const auto it = locations.find(key);
  if (it == locations.end()) throw ConfigError(path + ": error: " + key + ": " + what);
  throw ConfigError(diagnostic(path, it->second, key + ": " + what));
}

ProblemConfig load_string(const std::string& text, const std::string& path) {
  IniDocument doc = parse_ini(text, path);
  Reader r(doc);
  ProblemConfig cfg;
  cfg.path = path;

  if (!doc.sections.count("problem")) r.missing("problem", "alpha");
  cfg.alpha = r.real("problem", "alpha", std::nullopt);
  if (!(cfg.alpha > 1.0 && cfg.alpha <= 2.0)) r.fail(*r.find("problem", "alpha"), "alpha must lie in (1, 2]");
  cfg.t_max = r.real("problem", "T", 1.0);
  if (!(cfg.t_max > 0.0)) r.fail(*r.find("problem", "T"), "T must be positive");
  cfg.n_steps = r.count("problem", "n_steps", std::nullopt, 2);
  cfg.modes = r.count("problem", "modes", 1, 1);
  cfg.seed = r.count("problem", "seed", 1);
  cfg.limits.max_modes = r.count("problem", "max_modes", cfg.limits.max_modes, 1);
  cfg.limits.max_steps = r.count("problem", "max_steps", cfg.limits.max_steps, 2);

  cfg.a = r.field("coefficients", "a", "1");
  cfg.b = r.field("coefficients", "b", "0");
  cfg.c = r.field("coefficients", "c", "0");
  cfg.sigma0 = r.real("coefficients", "sigma0", std::nullopt);
  cfg.sigma1 = r.real("coefficients", "sigma1", std::nullopt);
  if (!(cfg.sigma0 > 0.0)) r.fail(*r.find("coefficients", "sigma0"), "sigma0 must be positive");
  if (!(cfg.sigma1 >= cfg.sigma0)) r.fail(*r.find("coefficients", "sigma1"), "sigma1 must be at least sigma0");

  cfg.u0 = r.field("data", "u0", "0");
  cfg.u1 = r.field("data", "u1", "0");
  cfg.forcing = r.field("data", "F", "0");
  for (const Field* f : {&cfg.u0, &cfg.u1})
    if (f->expr.depends_on_t())
      throw ConfigError(diagnostic(path, f->where, "initial data may depend on x only",
                                   f->expr.source().size()));

  cfg.lattice.x_nodes = r.count("output", "x_nodes", cfg.lattice.x_nodes, 2);
  cfg.lattice.t_stride = r.count("output", "t_stride", cfg.lattice.t_stride, 1);

  VerifyConfig& v = cfg.verify;
  if (const Entry* e = r.find("verify", "checks")) {
    static const std::set<std::string> kKnown{"coercivity", "matrix", "weak", "strong", "problem"};
    v.checks = r.items(*e);
    for (const auto& c : v.checks)
      if (!kKnown.count(c))
        r.fail(*e, "unknown check '" + c + "' (expected coercivity, matrix, weak, strong or problem)");
  }
  v.tol_ineq = r.real("verify", "tol_ineq", v.tol_ineq);
  if (!(v.tol_ineq >= 0.0)) r.fail(*r.find("verify", "tol_ineq"), "tol_ineq must be non-negative");
  v.coercivity_gammas = r.reals("verify", "coercivity_gammas", v.coercivity_gammas);
  v.coercivity_cases = r.count("verify", "coercivity_cases", v.coercivity_cases, 1);
  v.coercivity_steps = r.count("verify", "coercivity_steps", v.coercivity_steps, 2);
  v.matrix_gammas = r.reals("verify", "matrix_gammas", v.matrix_gammas);
  v.matrix_cases = r.count("verify", "matrix_cases", v.matrix_cases, 1);
  v.matrix_steps = r.count("verify", "matrix_steps", v.matrix_steps, 2);
  v.matrix_modes = r.count("verify", "matrix_modes", v.matrix_modes, 1);
  v.battery_size = r.count("verify", "battery_size", v.battery_size, 1);
  v.battery_alphas = r.reals("verify", "battery_alphas", v.battery_alphas);
  v.battery_steps = r.count("verify", "battery_steps", v.battery_steps, 2);
  v.battery_modes = r.count("verify", "battery_modes", v.battery_modes, 1);
  for (const char* key : {"coercivity_gammas", "matrix_gammas"}) {
    const auto& gammas = std::string(key) == "coercivity_gammas" ? v.coercivity_gammas : v.matrix_gammas;
    for (double g : gammas)
      if (!(g > 0.0 && g <= 1.0)) r.fail(*r.find("verify", key), "gammas must lie in (0, 1]");
  }
  for (double a : v.battery_alphas)
    if (!(a > 1.0 && a <= 2.0)) r.fail(*r.find("verify", "battery_alphas"), "alphas must lie in (1, 2]");

  if (doc.sections.count("convergence")) {
    ConvergenceConfig c;
    c.time_ladder = r.counts("convergence", "time_ladder");
    c.mode_ladder = r.counts("convergence", "mode_ladder");
    if (const Entry* e = r.find("convergence", "reference")) {
      c.reference = e->value;
      if (c.reference != "auto" && c.reference != "oracle" && c.reference != "finest")
        r.fail(*e, "reference must be auto, oracle or finest");
    }
    c.reference_modes = r.count("convergence", "reference_modes", c.reference_modes, 1);
    for (const char* key : {"time_ladder", "mode_ladder"}) {
      const auto& ladder = std::string(key) == "time_ladder" ? c.time_ladder : c.mode_ladder;
      if (ladder.empty()) continue;
      const Entry& e = *r.find("convergence", key);
      if (ladder.size() < 2) r.fail(e, "a refinement ladder needs at least two levels");
      for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (ladder[i] == 0) r.fail(e, "ladder levels must be positive");
        if (i > 0 && ladder[i] <= ladder[i - 1]) r.fail(e, "ladder levels must increase");
      }
      if (std::string(key) == "time_ladder")
        for (std::size_t i = 1; i < ladder.size(); ++i)
          if (ladder[i] % ladder[i - 1] != 0) r.fail(e, "each time level must divide the next");
    }
    if (!c.mode_ladder.empty() && c.reference_modes <= c.mode_ladder.back())
      r.fail(r.find("convergence", "reference_modes") ? *r.find("convergence", "reference_modes")
                                                     : *r.find("convergence", "mode_ladder"),
             "reference_modes must exceed the finest mode level");
    cfg.convergence = c;
  }

  r.reject_unused();
  for (const auto& [section, entries] : doc.sections)
    for (const auto& [key, entry] : entries) cfg.locations[section + "." + key] = entry.where;

  try {
    galerkin::validate(cfg.coefficients(), cfg.t_max);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Domain && e.code() != ErrorCode::Evaluation) throw;
    cfg.fail("coefficients.a", e.what());
  }
  return cfg;
}

ProblemConfig load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_string(buf.str(), path.string());
}

}  // namespace fracwave::config
