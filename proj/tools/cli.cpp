#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "qlnorm/continuation.hpp"
#include "qlnorm/diagnostics.hpp"
#include "qlnorm/error.hpp"
#include "qlnorm/io.hpp"
#include "qlnorm/shoot.hpp"

namespace qlnorm::cli {

namespace {

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "N",     "p",       "c",     "mu0",      "mu-min", "mu-factor", "grid-n",
      "r-max", "kind",    "jobs",  "seed",     "out",    "c-list",    "solution",
      "probes", "bisect", "grad-tol", "newton-tol"};
  return keys;
}

const std::string& key_help(const std::string& key) {
  static const std::map<std::string, std::string> help = {
      {"N", "space dimension"},
      {"p", "nonlinearity exponent"},
      {"c", "prescribed mass"},
      {"mu0", "first mu of the continuation ladder (0: solve at mu = 0 directly)"},
      {"mu-min", "last mu of the ladder"},
      {"mu-factor", "ratio between ladder steps"},
      {"grid-n", "number of radial intervals"},
      {"r-max", "box radius (solve: grown from 40 when unset)"},
      {"kind", "global-min, local-min or mountain-pass"},
      {"jobs", "parallel scan rows"},
      {"seed", "probe family seed"},
      {"out", "output directory"},
      {"c-list", "comma-separated increasing masses"},
      {"solution", "solution file to verify"},
      {"probes", "probe count for barrier calibration"},
      {"bisect", "also bisect for the threshold mass"},
      {"grad-tol", "stationarity tolerance"},
      {"newton-tol", "Newton residual tolerance"}};
  return help.at(key);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string env_name(const std::string& key) {
  std::string out = "QLNORM_";
  for (char ch : key) out += ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != v.size() || !std::isfinite(x))
    throw Error(ErrorKind::InvalidConfig, key + ": not a number: '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw Error(ErrorKind::InvalidConfig, key + ": not an integer: '" + v + "'");
  return static_cast<long long>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off" || v.empty()) return false;
  throw Error(ErrorKind::InvalidConfig, key + ": not a boolean: '" + v + "'");
}

std::string path_in(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out) / name).string();
}

FlowConfig flow_config(const RunConfig& cfg) {
  FlowConfig f;
  f.grad_tol = cfg.grad_tol;
  return f;
}

int fail(int code, const std::string& reason, const std::string& detail) {
  std::cerr << "reason=" << reason << ": " << detail << '\n';
  return code;
}

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::Parse:
    case ErrorKind::NotApplicable:
    case ErrorKind::DimensionMismatch:
      return kConfig;
    default:
      return kConvergence;
  }
}

std::vector<double> radii(const RadialField& u) {
  return std::vector<double>(u.grid->r.data(), u.grid->r.data() + u.grid->size());
}
std::vector<double> values(const RadialField& u) {
  return std::vector<double>(u.u.data(), u.u.data() + u.u.size());
}

void require_regime(const Params& prm) {
  if (classify(prm.N, prm.p) == Regime::Inadmissible) {
    std::ostringstream os;
    os << "p = " << prm.p << " is not admissible for N = " << prm.N;
    if (prm.N >= 3) os << " (needs p < " << quasi_critical_exponent(prm.N) << ")";
    throw Error(ErrorKind::InvalidConfig, os.str());
  }
}

struct SolveOutcome {
  ContinuationTrace trace;
  SolveReport report;
};

SolveOutcome solve_on(const RunConfig& cfg, Classification kind, GridPtr grid) {
  Params prm{cfg.N, cfg.p, cfg.c, 0.0};
  ContinuationConfig cc;
  cc.flow = flow_config(cfg);
  cc.newton.tol = cfg.newton_tol;
  cc.mpass.newton.tol = cfg.newton_tol;
  cc.probes = cfg.probes;
  cc.seed = cfg.seed;
  const std::vector<double> schedule =
      cfg.mu0 > 0.0 ? mu_schedule(cfg.mu0, cfg.mu_factor, cfg.mu_min) : std::vector<double>{0.0};
  SolveOutcome out;
  out.trace = continue_solve(kind, prm, grid, schedule, cc);
  if (!out.trace.truncated) out.report = classify_limit(out.trace, cfg.grad_tol);
  return out;
}

bool tail_negligible(const RadialField& u) {
  const int n = u.grid->n;
  return std::abs(u.u[n - 1]) <= 1e-8 * u.u.cwiseAbs().maxCoeff();
}

}  // namespace

Settings default_settings() {
  RunConfig d;
  return {{"N", "3"},           {"p", "3"},          {"c", "1"},         {"mu0", "0"},
          {"mu-min", "1e-6"},   {"mu-factor", "0.1"}, {"kind", "global-min"}, {"jobs", "1"},
          {"seed", "1"},        {"out", d.out},      {"probes", "60"},   {"bisect", "0"},
          {"grad-tol", "1e-8"}, {"newton-tol", "1e-10"}};
}

Settings parse_config_text(const std::string& text, const std::string& source) {
  Settings s;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Parse, source + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
      throw Error(ErrorKind::Parse, source + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    s[key] = trim(line.substr(eq + 1));
  }
  return s;
}

Settings settings_from_env() {
  Settings s;
  for (const auto& k : known_keys())
    if (const char* v = std::getenv(env_name(k).c_str())) s[k] = v;
  return s;
}

void overlay(Settings& base, const Settings& top) {
  for (const auto& [k, v] : top) base[k] = v;
}

RunConfig resolve(const std::string& command, const Settings& s) {
  RunConfig c;
  c.command = command;
  auto has = [&](const char* k) { return s.count(k) && !s.at(k).empty(); };
  if (has("N")) c.N = static_cast<int>(to_int("N", s.at("N")));
  if (has("p")) c.p = to_double("p", s.at("p"));
  if (has("c")) c.c = to_double("c", s.at("c"));
  if (has("mu0")) c.mu0 = to_double("mu0", s.at("mu0"));
  if (has("mu-min")) c.mu_min = to_double("mu-min", s.at("mu-min"));
  if (has("mu-factor")) c.mu_factor = to_double("mu-factor", s.at("mu-factor"));
  if (has("grid-n")) c.grid_n = static_cast<int>(to_int("grid-n", s.at("grid-n")));
  if (has("r-max")) c.r_max = to_double("r-max", s.at("r-max"));
  if (has("kind")) c.kind = s.at("kind");
  if (has("jobs")) c.jobs = static_cast<int>(to_int("jobs", s.at("jobs")));
  if (has("seed")) c.seed = static_cast<std::uint64_t>(to_int("seed", s.at("seed")));
  if (has("out")) c.out = s.at("out");
  if (has("solution")) c.solution = s.at("solution");
  if (has("probes")) c.probes = static_cast<int>(to_int("probes", s.at("probes")));
  if (has("bisect")) c.bisect = to_bool("bisect", s.at("bisect"));
  if (has("grad-tol")) c.grad_tol = to_double("grad-tol", s.at("grad-tol"));
  if (has("newton-tol")) c.newton_tol = to_double("newton-tol", s.at("newton-tol"));
  if (has("c-list")) {
    std::stringstream ss(s.at("c-list"));
    std::string item;
    while (std::getline(ss, item, ','))
      if (!trim(item).empty()) c.c_list.push_back(to_double("c-list", trim(item)));
  }
  if (c.grid_n < 16) throw Error(ErrorKind::InvalidConfig, "grid-n must be >= 16");
  if (c.r_max && !(*c.r_max > 0.0)) throw Error(ErrorKind::InvalidConfig, "r-max must be positive");
  if (c.jobs < 1) throw Error(ErrorKind::InvalidConfig, "jobs must be >= 1");
  if (c.probes < 1) throw Error(ErrorKind::InvalidConfig, "probes must be >= 1");
  if (c.mu0 < 0.0) throw Error(ErrorKind::InvalidConfig, "mu0 must be >= 0");
  if (!(c.grad_tol > 0.0) || !(c.newton_tol > 0.0))
    throw Error(ErrorKind::InvalidConfig, "tolerances must be positive");
  if (c.mu0 > 0.0) mu_schedule(c.mu0, c.mu_factor, c.mu_min);  // validates the ladder
  return c;
}

int cmd_solve(const RunConfig& cfg) {
  Params prm{cfg.N, cfg.p, cfg.c, 0.0};
  prm.validate();
  require_regime(prm);
  const Classification kind = classification_from_string(cfg.kind);
  if (kind == Classification::Failed) throw Error(ErrorKind::InvalidConfig, "kind must name a solution type");
  if (kind != Classification::GlobalMin && classify(cfg.N, cfg.p) != Regime::Intermediate)
    throw Error(ErrorKind::InvalidConfig, std::string(to_string(kind)) + " needs 1 + 4/N < p < 3 + 4/N");

  const double h = cfg.r_max ? *cfg.r_max / cfg.grid_n : 40.0 / cfg.grid_n;
  double R = cfg.r_max.value_or(40.0);
  SolveOutcome res;
  for (int attempt = 0;; ++attempt) {
    GridPtr grid = build_grid(cfg.N, R, static_cast<int>(std::lround(R / h)));
    res = solve_on(cfg, kind, grid);
    const bool grow = !cfg.r_max && attempt < 4 &&
                      ((res.trace.truncated && res.trace.error == ErrorKind::Geometry) ||
                       (!res.trace.truncated && !tail_negligible(res.report.field)));
    if (!grow) break;
    R *= 2.0;
  }
  std::filesystem::create_directories(cfg.out);
  write_atomic(path_in(cfg, "trace.csv"), res.trace.csv());
  if (!res.trace.path_values.empty()) {
    std::ostringstream os;
    os.precision(12);
    os << "index,J\n";
    for (size_t j = 0; j < res.trace.path_values.size(); ++j) os << j << ',' << res.trace.path_values[j] << '\n';
    write_atomic(path_in(cfg, "path.csv"), os.str());
    Series s{"J along path", {}, res.trace.path_values};
    for (size_t j = 0; j < s.y.size(); ++j) s.x.push_back(double(j) / std::max<size_t>(1, s.y.size() - 1));
    write_atomic(path_in(cfg, "path.svg"), svg_plot({s}, {"energy along the path", "path parameter", "J"}));
  }
  if (res.trace.truncated)
    return fail(kConvergence, "convergence", res.trace.note.empty() ? "continuation stopped" : res.trace.note);

  const SolveReport& r = res.report;
  const auto ids = identity_suite(r, cfg.p, cfg.N);
  write_solution(path_in(cfg, "solution.txt"), r.field, prm);
  write_atomic(path_in(cfg, "identities.csv"), identity_csv(ids));
  write_atomic(path_in(cfg, "report.json"), report_json(r, prm, ids));
  write_atomic(path_in(cfg, "profile.svg"),
               svg_plot({{"u", radii(r.field), values(r.field)}}, {"radial profile", "r", "u"}));
  std::cout << "kind=" << to_string(r.classification) << " J=" << r.J_value << " lambda=" << r.lambda
            << " R_max=" << r.field.grid->R_max << '\n'
            << identity_summary(ids);
  if (r.classification == Classification::Failed) return fail(kConvergence, "misclassification", r.note);
  for (const auto& id : ids)
    if (!id.pass) return fail(kIdentity, "identity", id.name);
  return kOk;
}

int cmd_scan(const RunConfig& cfg) {
  Params prm{cfg.N, cfg.p, cfg.c_list.empty() ? cfg.c : cfg.c_list.front(), 0.0};
  prm.validate();
  require_regime(prm);
  std::vector<double> cl = cfg.c_list.empty() ? std::vector<double>{cfg.c} : cfg.c_list;
  GridPtr grid = build_grid(cfg.N, cfg.r_max.value_or(40.0), cfg.grid_n);
  const FlowConfig fc = flow_config(cfg);
  MassScan scan = mass_scan(cfg.p, cfg.N, cl, grid, fc, cfg.jobs);
  std::filesystem::create_directories(cfg.out);
  write_atomic(path_in(cfg, "scan.csv"), scan.csv());
  Series m{"m(c)", {}, {}}, beta{"lambda", {}, {}};
  for (const auto& row : scan.rows) {
    m.x.push_back(row.c);
    m.y.push_back(row.m);
    beta.x.push_back(row.c);
    beta.y.push_back(row.lambda);
  }
  write_atomic(path_in(cfg, "scan_m.svg"), svg_plot({m}, {"minimum energy", "c", "m(c)"}));
  write_atomic(path_in(cfg, "scan_lambda.svg"), svg_plot({beta}, {"multiplier", "c", "lambda"}));
  std::cout << scan.csv();

  if (cfg.bisect) {
    nlohmann::ordered_json j;
    const Regime reg = classify(cfg.N, cfg.p);
    const double lo = cl.front(), hi = cl.back();
    if (reg == Regime::Intermediate) {
      const CpnEstimate e = estimate_cpn(cfg.p, cfg.N, lo, hi, grid, fc);
      j = {{"quantity", "c(p,N)"}, {"c", e.c}, {"lo", e.lo}, {"hi", e.hi}, {"evaluations", e.evaluations}};
    } else if (reg == Regime::Critical) {
      const double cN = estimate_cN(cfg.N, grid, lo, hi, cfg.probes);
      j = {{"quantity", "c_N"}, {"c", cN}};
    } else {
      throw Error(ErrorKind::InvalidConfig, "bisection needs 1 + 4/N < p <= 3 + 4/N");
    }
    write_atomic(path_in(cfg, "bisect.json"), j.dump(2) + "\n");
    std::cout << j.dump() << '\n';
  }
  for (const auto& row : scan.rows)
    if (row.status == RowStatus::Failed || row.status == RowStatus::NotConverged)
      return fail(kConvergence, "convergence", "row c=" + std::to_string(row.c) + " " + to_string(row.status));
  return kOk;
}

int cmd_verify(const RunConfig& cfg) {
  if (cfg.solution.empty()) throw Error(ErrorKind::InvalidConfig, "verify needs --solution");
  const SolutionFile sf = read_solution(cfg.solution);
  sf.params.validate();
  if (!(mass(sf.field) > 0.0)) return fail(kConfig, "trivial", "the solution file holds the zero field");
  Params prm = sf.params;
  SolveReport rep = make_report(sf.field, prm, 0, true, Classification::Failed, cfg.grad_tol);
  const auto ids = identity_suite(rep, prm.p, prm.N);
  std::filesystem::create_directories(cfg.out);
  write_atomic(path_in(cfg, "identities.csv"), identity_csv(ids));
  write_atomic(path_in(cfg, "verify.json"), report_json(rep, prm, ids));
  std::cout << identity_summary(ids);
  for (const auto& id : ids)
    if (!id.pass) return fail(kIdentity, "identity", id.name);
  return kOk;
}

int cmd_decay(const RunConfig& cfg) {
  Params prm{cfg.N, cfg.p, 1.0, 0.0};
  prm.validate();
  require_regime(prm);
  if (cfg.N < 3 || !(cfg.p > sobolev_exponent(cfg.N)))
    throw Error(ErrorKind::InvalidConfig, "decay needs N >= 3 and (N+2)/(N-2) < p < (3N+2)/(N-2)");
  ShootConfig sc;
  sc.lambda = 0.0;
  sc.r_max = cfg.r_max.value_or(200.0);
  sc.step = sc.r_max / cfg.grid_n;
  const DualTransform t = build_transform(1e6, 4000);
  const ShotResult shot = find_ground(sc, t, cfg.p, cfg.N);
  const DecayReport d = decay_fit(shot, t, cfg.p, cfg.N);
  const RadialField v = shot.field();
  const bool member = l2_membership(v, cfg.N);

  std::filesystem::create_directories(cfg.out);
  write_atomic(path_in(cfg, "shot.csv"), shot_csv(shot));
  write_atomic(path_in(cfg, "decay.csv"), decay_csv(d));
  write_solution(path_in(cfg, "profile_v.txt"), v, Params{cfg.N, cfg.p, mass(v), 0.0});
  const RadialField u = to_primal(t, v);
  write_solution(path_in(cfg, "profile_u.txt"), u, Params{cfg.N, cfg.p, mass(u), 0.0});
  Series sv{"v", {}, {}}, sk{"C_fit K(r)", {}, {}};
  for (int i = 1; i < v.grid->size(); ++i) {
    const double r = v.grid->r[i];
    if (r > shot.r_stop) break;
    sv.x.push_back(r);
    sv.y.push_back(v.u[i]);
    sk.x.push_back(r);
    sk.y.push_back(d.C_fit * kernel_K(r, cfg.N));
  }
  PlotOptions po{"tail decay", "r", "v", true, true};
  write_atomic(path_in(cfg, "decay.svg"), svg_plot({sv, sk}, po));
  nlohmann::ordered_json j = {{"N", cfg.N},          {"p", cfg.p},
                              {"v0", shot.v0},       {"slope", d.slope},
                              {"C_fit", d.C_fit},    {"C_integral", d.C_integral},
                              {"window", {d.window.first, d.window.second}},
                              {"l2_membership", member}};
  write_atomic(path_in(cfg, "decay.json"), j.dump(2) + "\n");
  std::cout << j.dump() << '\n';
  return kOk;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Normalized solutions of a quasi-linear Schrodinger equation"};
  app.require_subcommand(1);
  std::map<std::string, std::string> flag_values;
  std::string config_path;
  std::vector<std::pair<CLI::App*, std::vector<CLI::Option*>>> subs;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "Solve for a global minimum, local minimum or mountain-pass solution"},
      {"scan", "Tabulate m(c) and the multiplier over a list of masses"},
      {"verify", "Check the identities on a stored solution file"},
      {"decay", "Shoot the zero-frequency profile and fit its tail"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key=value file");
    std::vector<CLI::Option*> opts;
    for (const auto& k : known_keys())
      opts.push_back(sub->add_option("--" + k, flag_values[k], key_help(k)));
    subs.emplace_back(sub, std::move(opts));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  for (const auto& [sub, opts] : subs) {
    if (!sub->parsed()) continue;
    try {
      Settings s = default_settings();
      if (!config_path.empty()) overlay(s, parse_config_text(read_text(config_path), config_path));
      overlay(s, settings_from_env());
      Settings flags;
      for (size_t i = 0; i < opts.size(); ++i)
        if (opts[i]->count() > 0) flags[known_keys()[i]] = flag_values[known_keys()[i]];
      overlay(s, flags);
      const RunConfig cfg = resolve(sub->get_name(), s);
      if (cfg.command == "solve") return cmd_solve(cfg);
      if (cfg.command == "scan") return cmd_scan(cfg);
      if (cfg.command == "verify") return cmd_verify(cfg);
      return cmd_decay(cfg);
    } catch (const Error& e) {
      return fail(exit_for(e), exit_for(e) == kConfig ? "config" : "convergence", e.what());
    }
  }
  return kConfig;
}

}  // namespace qlnorm::cli
