#include "fracwave/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "fracwave/config.hpp"
#include "fracwave/random.hpp"
#include "fracwave/special.hpp"
#include "fracwave/verify.hpp"
#include "json.hpp"

namespace fracwave::cli {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw Error(ErrorCode::Io, "failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

std::size_t resolve_threads(std::optional<std::size_t> requested) {
  if (requested) {
    if (*requested == 0) throw Error(ErrorCode::Config, "--threads must be a positive integer");
    return *requested;
  }
  if (const char* env = std::getenv("FRACWAVE_THREADS"); env && *env) {
    std::size_t v = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v == 0)
      throw Error(ErrorCode::Config, "FRACWAVE_THREADS must be a positive integer, found '" + std::string(s) + "'");
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// JSON has no NaN or infinity; those become strings so files stay valid.
Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

Json named(const verify::NamedValues& values) {
  Json out = Json::object();
  for (const auto& [k, v] : values) out[k] = number(v);
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json field_json(const config::Field& f) {
  return Json{{"source", f.expr.source()},
              {"parsed", expr::to_string(f.expr)},
              {"depends_on_x", f.expr.depends_on_x()},
              {"depends_on_t", f.expr.depends_on_t()}};
}

Json config_json(const config::ProblemConfig& cfg) {
  Json j;
  j["problem"] = {{"alpha", cfg.alpha},           {"T", cfg.t_max},
                  {"n_steps", cfg.n_steps},       {"modes", cfg.modes},
                  {"seed", cfg.seed},             {"max_modes", cfg.limits.max_modes},
                  {"max_steps", cfg.limits.max_steps}};
  j["coefficients"] = {{"a", field_json(cfg.a)},
                       {"b", field_json(cfg.b)},
                       {"c", field_json(cfg.c)},
                       {"sigma0", cfg.sigma0},
                       {"sigma1", cfg.sigma1}};
  j["data"] = {{"u0", field_json(cfg.u0)}, {"u1", field_json(cfg.u1)}, {"F", field_json(cfg.forcing)}};
  j["output"] = {{"x_nodes", cfg.lattice.x_nodes}, {"t_stride", cfg.lattice.t_stride}};
  const auto& v = cfg.verify;
  j["verify"] = {{"checks", v.checks},
                 {"tol_ineq", v.tol_ineq},
                 {"coercivity_gammas", v.coercivity_gammas},
                 {"coercivity_cases", v.coercivity_cases},
                 {"coercivity_steps", v.coercivity_steps},
                 {"matrix_gammas", v.matrix_gammas},
                 {"matrix_cases", v.matrix_cases},
                 {"matrix_steps", v.matrix_steps},
                 {"matrix_modes", v.matrix_modes},
                 {"battery_size", v.battery_size},
                 {"battery_alphas", v.battery_alphas},
                 {"battery_steps", v.battery_steps},
                 {"battery_modes", v.battery_modes}};
  if (cfg.convergence) {
    const auto& c = *cfg.convergence;
    j["convergence"] = {{"time_ladder", c.time_ladder},
                        {"mode_ladder", c.mode_ladder},
                        {"reference", c.reference},
                        {"reference_modes", c.reference_modes}};
  } else {
    j["convergence"] = nullptr;
  }
  return j;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Verify: return "verify";
    case Command::Convergence: return "convergence";
  }
  return "?";
}

struct Context {
  const RunOptions& options;
  config::ProblemConfig cfg;
  std::size_t threads;
  std::ostream& out;
  std::ostream& err;
  Json timings = Json::object();

  fs::path file(const char* name) const { return options.out_dir / name; }

  void write_run_json() const {
    Json run;
    run["program"] = "fracwave";
    run["version"] = kVersion;
    run["command"] = command_name(options.command);
    run["config_path"] = options.config.string();
    run["config"] = config_json(cfg);
    write_atomic(file("run.json"), dump(run));
  }

  void write_timings() const {
    Json j;
    j["threads"] = threads;
    j["seconds"] = timings;
    write_atomic(file("timings.json"), dump(j));
  }
};

// ---------------------------------------------------------------- solve

int cmd_solve(Context& ctx) {
  auto t0 = Clock::now();
  const auto problem = ctx.cfg.spectral_problem(ctx.threads);
  ctx.timings["project"] = seconds_since(t0);
  t0 = Clock::now();
  const auto bundle = galerkin::solve_ibvp(problem, ctx.cfg.lattice, ctx.cfg.limits, ctx.threads);
  ctx.timings["solve"] = seconds_since(t0);

  t0 = Clock::now();
  std::string field = "t,x,u\n";
  const auto& lat = bundle.field;
  for (std::size_t ti = 0; ti < lat.t.size(); ++ti)
    for (std::size_t xi = 0; xi < lat.x.size(); ++xi)
      field += format_double(lat.t[ti]) + ',' + format_double(lat.x[xi]) + ',' + format_double(lat.at(ti, xi)) + '\n';

  std::string coeffs = "t";
  for (std::size_t k = 1; k <= problem.modes; ++k) coeffs += ",p_" + std::to_string(k);
  coeffs += '\n';
  const auto& u = bundle.p.u;
  for (std::size_t i = 0; i < u.n_nodes(); ++i) {
    coeffs += format_double(problem.grid.node(i));
    for (std::size_t k = 0; k < problem.modes; ++k) coeffs += ',' + format_double(u(i, k));
    coeffs += '\n';
  }

  const auto& n = bundle.norms;
  Json norms;
  norms["linf_h10"] = number(n.linf_h10);
  norms["dt_l2_l2"] = number(n.dt_l2_l2);
  norms["linf_h2"] = number(n.linf_h2);
  norms["caputo_linf_l2"] = number(n.caputo_linf_l2);
  norms["caputo_l2_hminus1"] = number(n.caputo_l2_hminus1);
  norms["residual"] = number(bundle.p.residual);
  norms["a0_h1_truncation"] = number(problem.a0_h1_truncation);

  fs::create_directories(ctx.options.out_dir);
  write_atomic(ctx.file("field.csv"), field);
  write_atomic(ctx.file("coeffs.csv"), coeffs);
  write_atomic(ctx.file("norms.json"), dump(norms));
  ctx.write_run_json();
  ctx.timings["write"] = seconds_since(t0);
  ctx.write_timings();

  ctx.out << "solve: alpha=" << format_double(ctx.cfg.alpha) << " modes=" << problem.modes
          << " n_steps=" << problem.grid.n_steps() << " residual=" << format_double(bundle.p.residual) << '\n'
          << "  ||u||_Linf(H1_0) = " << format_double(n.linf_h10) << '\n'
          << "  wrote field.csv, coeffs.csv, norms.json, run.json to " << ctx.options.out_dir.string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- verify

struct CheckRow {
  std::string name;
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t na = 0;
  std::string detail;
  Json witnesses = Json::array();
  Json summary = Json::object();

  void count(verify::Verdict v) {
    if (v == verify::Verdict::Pass) ++pass;
    else if (v == verify::Verdict::Fail) ++fail;
    else ++na;
  }
};

Json witness_json(const verify::InequalityWitness& w) {
  return Json{{"name", w.name},
              {"verdict", verify::to_string(w.verdict)},
              {"margin", number(w.margin)},
              {"tolerance", number(w.tolerance)},
              {"note", w.note},
              {"fitted", named(w.fitted)},
              {"params", named(w.params)}};
}

Json entry_json(const verify::EstimateEntry& e) {
  return Json{{"name", e.name},
              {"alpha", e.alpha},
              {"seed", e.seed},
              {"verdict", verify::to_string(e.verdict)},
              {"lhs", number(e.lhs)},
              {"rhs", number(e.rhs)},
              {"ratio", number(e.ratio)},
              {"note", e.note},
              {"lhs_terms", named(e.lhs_terms)},
              {"rhs_terms", named(e.rhs_terms)}};
}

CheckRow inequality_row(const std::string& name, const std::vector<verify::InequalityWitness>& ws) {
  CheckRow row;
  row.name = name;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& w : ws) {
    row.count(w.verdict);
    row.witnesses.push_back(witness_json(w));
    worst = std::min(worst, w.margin + w.tolerance);
  }
  row.detail = "min slack-adjusted margin " + format_double(worst);
  return row;
}

// Battery rows: individual entries carry their own verdicts; the battery also
// fails when ratios are non-finite or spread beyond 10x the median.
CheckRow battery_row(const std::string& name, const std::vector<verify::EstimateEntry>& entries) {
  CheckRow row;
  row.name = name;
  for (const auto& e : entries) {
    row.count(e.verdict);
    row.witnesses.push_back(entry_json(e));
  }
  const auto s = verify::summarize(entries);
  row.summary = {{"applicable", s.applicable}, {"median", number(s.median)}, {"max", number(s.max)},
                 {"finite", s.finite},         {"uniform", s.uniform}};
  if (s.applicable > 0 && !(s.finite && s.uniform)) {
    ++row.fail;
    row.detail = "ratio spread too large: ";
  }
  row.detail += "median ratio " + format_double(s.median) + ", max " + format_double(s.max);
  return row;
}

std::vector<verify::InequalityWitness> config_matrix_witnesses(const Context& ctx) {
  const auto& v = ctx.cfg.verify;
  const auto coeffs = ctx.cfg.coefficients();
  const TimeGrid grid(ctx.cfg.t_max, v.matrix_steps);
  std::vector<verify::InequalityWitness> out(v.matrix_gammas.size());
  Rng seeds(ctx.cfg.seed);
  std::vector<std::uint64_t> mode_seeds(v.matrix_modes);
  for (auto& s : mode_seeds) s = seeds.derive_seed();
  const auto sampler = [&](const TimeGrid& g) {
    SampledPath p(g, v.matrix_modes);
    for (std::size_t k = 0; k < v.matrix_modes; ++k) {
      const SampledPath pk = band_limited_path(g, mode_seeds[k], true);
      for (std::size_t n = 0; n < g.n_nodes(); ++n) p(n, k) = pk(n) / static_cast<double>(k + 1);
    }
    return p;
  };
  for (std::size_t i = 0; i < v.matrix_gammas.size(); ++i) {
    out[i] = verify::check_coercivity_matrix(v.matrix_gammas[i], coeffs, sampler, grid, v.tol_ineq);
    out[i].name = "config-coefficients/" + out[i].name;
  }
  return out;
}

int cmd_verify(Context& ctx) {
  const auto& v = ctx.cfg.verify;
  const std::uint64_t seed = ctx.cfg.seed;
  std::vector<CheckRow> rows;

  if (v.enabled("coercivity")) {
    const auto t0 = Clock::now();
    verify::CoercivityOptions o;
    o.seed = seed;
    o.per_gamma = v.coercivity_cases;
    o.gammas = v.coercivity_gammas;
    o.n_steps = v.coercivity_steps;
    o.tol_ineq = v.tol_ineq;
    o.threads = ctx.threads;
    rows.push_back(inequality_row("coercivity", verify::coercivity_battery(o)));
    ctx.timings["coercivity"] = seconds_since(t0);
  }
  if (v.enabled("matrix")) {
    const auto t0 = Clock::now();
    verify::MatrixCoercivityOptions o;
    o.seed = seed;
    o.count = v.matrix_cases;
    o.gammas = v.matrix_gammas;
    o.n_steps = v.matrix_steps;
    o.modes = v.matrix_modes;
    o.tol_ineq = v.tol_ineq;
    o.threads = ctx.threads;
    o.time_dependent = true;
    rows.push_back(inequality_row("matrix (a(x,t))", verify::matrix_coercivity_battery(o)));
    o.time_dependent = false;
    rows.push_back(inequality_row("matrix (a(x))", verify::matrix_coercivity_battery(o)));
    rows.push_back(inequality_row("matrix (config a)", config_matrix_witnesses(ctx)));
    ctx.timings["matrix"] = seconds_since(t0);
  }
  verify::BatteryOptions b;
  b.seed = seed;
  b.count = v.battery_size;
  b.alphas = v.battery_alphas;
  b.n_steps = v.battery_steps;
  b.modes = v.battery_modes;
  b.threads = ctx.threads;
  if (v.enabled("weak")) {
    const auto t0 = Clock::now();
    rows.push_back(battery_row("weak estimate", verify::weak_battery(b)));
    ctx.timings["weak"] = seconds_since(t0);
  }
  if (v.enabled("strong")) {
    const auto t0 = Clock::now();
    rows.push_back(battery_row("strong estimate", verify::strong_battery(b)));
    ctx.timings["strong"] = seconds_since(t0);
  }
  if (v.enabled("problem")) {
    const auto t0 = Clock::now();
    const auto problem = ctx.cfg.spectral_problem(ctx.threads);
    const auto bundle = galerkin::solve_ibvp(problem, ctx.cfg.lattice, ctx.cfg.limits, ctx.threads);
    CheckRow row;
    row.name = "config problem";
    const auto weak = verify::check_weak_estimate(bundle, problem);
    const auto strong = verify::check_strong_estimate(bundle, problem);
    for (const auto* e : {&weak, &strong}) {
      row.count(e->verdict);
      row.witnesses.push_back(entry_json(*e));
    }
    row.detail = "weak ratio " + format_double(weak.ratio) + ", strong " +
                 (strong.verdict == verify::Verdict::NotApplicable ? std::string("not-applicable")
                                                                    : "ratio " + format_double(strong.ratio));
    rows.push_back(std::move(row));
    ctx.timings["problem"] = seconds_since(t0);
  }

  std::size_t fails = 0;
  std::size_t nas = 0;
  Json checks = Json::array();
  for (const auto& r : rows) {
    fails += r.fail;
    nas += r.na;
    checks.push_back(Json{{"name", r.name},
                          {"pass", r.pass},
                          {"fail", r.fail},
                          {"not_applicable", r.na},
                          {"detail", r.detail},
                          {"summary", r.summary},
                          {"witnesses", r.witnesses}});
  }
  Json report;
  report["verdict"] = fails == 0 ? "pass" : "fail";
  report["tol_ineq"] = v.tol_ineq;
  report["seed"] = seed;
  report["checks"] = checks;

  fs::create_directories(ctx.options.out_dir);
  write_atomic(ctx.file("witnesses.json"), dump(report));
  ctx.write_run_json();
  ctx.write_timings();

  ctx.out << std::left << std::setw(20) << "check" << std::right << std::setw(6) << "pass" << std::setw(6) << "fail"
          << std::setw(6) << "n/a" << "  detail\n";
  for (const auto& r : rows)
    ctx.out << std::left << std::setw(20) << r.name << std::right << std::setw(6) << r.pass << std::setw(6) << r.fail
            << std::setw(6) << r.na << "  " << r.detail << '\n';
  ctx.out << (fails == 0 ? "verify: all applicable witnesses pass\n" : "verify: FAILED\n");
  if (nas > 0) {
    ctx.err << "warning: " << nas << " witness(es) not applicable (hypothesis rejected):\n";
    for (const auto& r : rows)
      for (const auto& w : r.witnesses)
        if (w["verdict"] == "not-applicable")
          ctx.err << "  " << r.name << ": " << w["name"].get<std::string>() << ": " << w["note"].get<std::string>()
                  << '\n';
  }
  return fails == 0 ? kOk : kVerificationFailed;
}

// ---------------------------------------------------------------- convergence

struct LadderRow {
  std::string ladder;
  std::size_t n_steps;
  std::size_t modes;
  std::optional<double> error;
  std::optional<double> order;
  std::string flag;
};

void fit_orders(std::vector<LadderRow>& rows, bool time_ladder) {
  std::vector<LadderRow*> measured;
  for (auto& r : rows)
    if (r.error) measured.push_back(&r);
  for (std::size_t i = 0; i < measured.size(); ++i) {
    auto& r = *measured[i];
    r.flag = "ok";
    if (i == 0) continue;
    const auto& p = *measured[i - 1];
    const double level = time_ladder ? static_cast<double>(r.n_steps) : static_cast<double>(r.modes);
    const double prev = time_ladder ? static_cast<double>(p.n_steps) : static_cast<double>(p.modes);
    if (*p.error > 0.0 && *r.error > 0.0) r.order = std::log(*p.error / *r.error) / std::log(level / prev);
    if (i >= 2 && !(*measured[i - 2]->error > *p.error && *p.error > *r.error)) r.flag = "non-monotone";
  }
}

// Mittag-Leffler closed form, available for constant a, c with b = 0 and F = 0.
bool oracle_available(const config::ProblemConfig& cfg) {
  auto constant = [](const config::Field& f) { return !f.expr.depends_on_x() && !f.expr.depends_on_t(); };
  return constant(cfg.a) && constant(cfg.b) && constant(cfg.c) && constant(cfg.forcing) &&
         cfg.b.expr(0, 0) == 0.0 && cfg.forcing.expr(0, 0) == 0.0;
}

double oracle_error(const config::ProblemConfig& cfg, const galerkin::SpectralProblem& problem,
                    const SampledPath& u) {
  const double a = cfg.a.expr(0, 0);
  const double c = cfg.c.expr(0, 0);
  const auto lambdas = problem.eigenvalues();
  double err = 0.0;
  for (std::size_t i = 0; i < u.n_nodes(); ++i) {
    const double t = problem.grid.node(i);
    for (std::size_t k = 0; k < problem.modes; ++k) {
      const double z = -(a * lambdas[k] + c) * std::pow(t, cfg.alpha);
      double exact = 0.0;
      if (problem.a0[k] != 0.0) exact += problem.a0[k] * mittag_leffler(cfg.alpha, 1.0, z);
      if (problem.a1[k] != 0.0) exact += problem.a1[k] * t * mittag_leffler(cfg.alpha, 2.0, z);
      err = std::max(err, std::fabs(u(i, k) - exact));
    }
  }
  return err;
}

// Display-only rounding; convergence.csv keeps full precision.
std::string brief(const std::optional<double>& v, bool scientific) {
  if (!v) return "-";
  std::ostringstream s;
  if (scientific) s << std::scientific << std::setprecision(3);
  else s << std::fixed << std::setprecision(3);
  s << *v;
  return s.str();
}

int cmd_convergence(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.convergence || (cfg.convergence->time_ladder.empty() && cfg.convergence->mode_ladder.empty()))
    throw config::ConfigError(cfg.path + ": error: convergence needs a [convergence] section with time_ladder or mode_ladder");
  const auto& conv = *cfg.convergence;
  std::vector<LadderRow> all;
  std::string time_reference;

  if (!conv.time_ladder.empty()) {
    const auto t0 = Clock::now();
    bool use_oracle = conv.reference == "oracle" || (conv.reference == "auto" && oracle_available(cfg));
    if (conv.reference == "oracle" && !oracle_available(cfg))
      cfg.fail("convergence.reference", "the oracle needs constant a and c, b = 0 and F = 0");
    std::vector<galerkin::SpectralProblem> problems;
    std::vector<SampledPath> solutions;
    for (std::size_t n : conv.time_ladder) {
      problems.push_back(cfg.spectral_problem(ctx.threads, n));
      solutions.push_back(fracode::solve_fode(galerkin::to_fode(problems.back(), cfg.limits, ctx.threads)).u);
    }
    std::vector<LadderRow> rows;
    if (use_oracle) {
      try {
        for (std::size_t l = 0; l < problems.size(); ++l)
          rows.push_back({"time", conv.time_ladder[l], cfg.modes, oracle_error(cfg, problems[l], solutions[l]), {}, ""});
        time_reference = "mittag-leffler";
      } catch (const Error& e) {
        if (e.code() != ErrorCode::UnsupportedRange || conv.reference == "oracle") throw;
        rows.clear();
        use_oracle = false;
      }
    }
    if (!use_oracle) {
      time_reference = "finest";
      const SampledPath& ref = solutions.back();
      const std::size_t n_ref = conv.time_ladder.back();
      for (std::size_t l = 0; l + 1 < problems.size(); ++l) {
        const std::size_t stride = n_ref / conv.time_ladder[l];
        double err = 0.0;
        for (std::size_t i = 0; i < solutions[l].n_nodes(); ++i)
          for (std::size_t k = 0; k < cfg.modes; ++k)
            err = std::max(err, std::fabs(solutions[l](i, k) - ref(i * stride, k)));
        rows.push_back({"time", conv.time_ladder[l], cfg.modes, err, {}, ""});
      }
      rows.push_back({"time", n_ref, cfg.modes, {}, {}, "reference"});
    }
    fit_orders(rows, true);
    all.insert(all.end(), rows.begin(), rows.end());
    ctx.timings["time_ladder"] = seconds_since(t0);
  }

  if (!conv.mode_ladder.empty()) {
    const auto t0 = Clock::now();
    auto field = [&](std::size_t modes) {
      return galerkin::solve_ibvp(cfg.spectral_problem(ctx.threads, std::nullopt, modes), cfg.lattice, cfg.limits,
                                  ctx.threads)
          .field.values;
    };
    const auto ref = field(conv.reference_modes);
    std::vector<LadderRow> rows;
    for (std::size_t modes : conv.mode_ladder) {
      const auto values = field(modes);
      double err = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) err = std::max(err, std::fabs(values[i] - ref[i]));
      rows.push_back({"modes", cfg.n_steps, modes, err, {}, ""});
    }
    fit_orders(rows, false);
    rows.push_back({"modes", cfg.n_steps, conv.reference_modes, {}, {}, "reference"});
    all.insert(all.end(), rows.begin(), rows.end());
    ctx.timings["mode_ladder"] = seconds_since(t0);
  }

  std::string csv = "ladder,n_steps,modes,error,order,flag\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : all)
    csv += r.ladder + ',' + std::to_string(r.n_steps) + ',' + std::to_string(r.modes) + ',' + opt(r.error) + ',' +
           opt(r.order) + ',' + r.flag + '\n';
  fs::create_directories(ctx.options.out_dir);
  write_atomic(ctx.file("convergence.csv"), csv);
  ctx.write_run_json();
  ctx.write_timings();

  if (!time_reference.empty()) ctx.out << "time ladder reference: " << time_reference << '\n';
  if (!conv.mode_ladder.empty()) ctx.out << "mode ladder reference: N = " << conv.reference_modes << '\n';
  ctx.out << std::left << std::setw(7) << "ladder" << std::right << std::setw(9) << "n_steps" << std::setw(7)
          << "modes" << std::setw(14) << "error" << std::setw(9) << "order" << "  flag\n";
  for (const auto& r : all) {
    ctx.out << std::left << std::setw(7) << r.ladder << std::right << std::setw(9) << r.n_steps << std::setw(7)
            << r.modes << std::setw(14) << brief(r.error, true) << std::setw(9) << brief(r.order, false) << "  "
            << r.flag << '\n';
  }
  std::size_t flagged = 0;
  for (const auto& r : all) flagged += r.flag == "non-monotone";
  if (flagged) ctx.err << "warning: " << flagged << " non-monotone triplet(s) in the refinement table\n";
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config:
    case ErrorCode::Syntax:
    case ErrorCode::Io:
    case ErrorCode::Evaluation: return kConfigError;
    default: return kNumericalFailure;
  }
}

}  // namespace

int run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const std::size_t threads = resolve_threads(options.threads);
    Context ctx{options, config::load(options.config), threads, out, err};
    if (options.seed) ctx.cfg.seed = *options.seed;
    switch (options.command) {
      case Command::Solve: return cmd_solve(ctx);
      case Command::Verify: return cmd_verify(ctx);
      case Command::Convergence: return cmd_convergence(ctx);
    }
    return kConfigError;
  } catch (const RefineGridError& e) {
    err << "error: " << e.what() << "\nhint: rerun with n_steps >= " << e.required_steps() << '\n';
    return kNumericalFailure;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    if (e.code() == ErrorCode::Config) err << e.what() << '\n';
    else err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return code;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace fracwave::cli
