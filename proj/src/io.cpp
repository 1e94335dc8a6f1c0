#include "qlnorm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "qlnorm/error.hpp"

namespace qlnorm {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[noreturn]] void parse_fail(const std::string& source, int line, const std::string& what) {
  throw Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& s, const std::string& source, int line) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    parse_fail(source, line, "not a number: '" + s + "'");
  }
  if (pos != s.size()) parse_fail(source, line, "trailing characters in '" + s + "'");
  if (!std::isfinite(v)) parse_fail(source, line, "non-finite value");
  return v;
}

}  // namespace

std::string format_solution(const RadialField& u, const Params& prm) {
  const auto& g = *u.grid;
  std::string out;
  out.reserve(40 * g.size() + 128);
  out += "N=" + std::to_string(g.N) + "\n";
  out += "p=" + num(prm.p) + "\n";
  out += "c=" + num(prm.c) + "\n";
  out += "mu=" + num(prm.mu) + "\n";
  out += "R_max=" + num(g.R_max) + "\n";
  out += "n=" + std::to_string(g.n) + "\n";
  for (int i = 0; i < g.size(); ++i) out += num(g.r[i]) + " " + num(u.u[i]) + "\n";
  return out;
}

SolutionFile parse_solution(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  const char* keys[] = {"N", "p", "c", "mu", "R_max", "n"};
  double vals[6];
  for (int k = 0; k < 6; ++k) {
    if (!std::getline(in, line)) parse_fail(source, lineno + 1, "missing header line " + std::string(keys[k]) + "=");
    ++lineno;
    const std::string key = std::string(keys[k]) + "=";
    if (line.rfind(key, 0) != 0) parse_fail(source, lineno, "expected '" + key + "'");
    vals[k] = parse_number(line.substr(key.size()), source, lineno);
  }
  const int N = static_cast<int>(vals[0]);
  const int n = static_cast<int>(vals[5]);
  if (N != vals[0] || N < 1) parse_fail(source, 1, "N must be a positive integer");
  if (n != vals[5] || n < 16) parse_fail(source, 6, "n must be an integer >= 16");
  SolutionFile sf;
  sf.params = Params{N, vals[1], vals[2], vals[3]};
  GridPtr g = build_grid(N, vals[4], n);
  Vec u(g->size());
  for (int i = 0; i < g->size(); ++i) {
    if (!std::getline(in, line)) parse_fail(source, lineno + 1, "expected " + std::to_string(g->size()) + " data rows");
    ++lineno;
    std::istringstream row(line);
    std::string rs, vs, extra;
    if (!(row >> rs >> vs) || (row >> extra)) parse_fail(source, lineno, "expected 'r value'");
    const double r = parse_number(rs, source, lineno);
    if (std::abs(r - g->r[i]) > 1e-9 * std::max(1.0, g->R_max))
      parse_fail(source, lineno, "radius does not match the grid");
    u[i] = parse_number(vs, source, lineno);
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") != std::string::npos) parse_fail(source, lineno, "unexpected trailing data");
  }
  sf.field = RadialField(g, std::move(u));
  return sf;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Parse, "cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

SolutionFile read_solution(const std::string& path) { return parse_solution(read_text(path), path); }

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw Error(ErrorKind::InvalidConfig, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

void write_solution(const std::string& path, const RadialField& u, const Params& prm) {
  write_atomic(path, format_solution(u, prm));
}

std::string report_json(const SolveReport& r, const Params& prm,
                        const std::vector<IdentityReport>& identities) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(r.classification);
  j["N"] = prm.N;
  j["p"] = prm.p;
  j["c"] = r.c;
  j["mu"] = r.mu;
  j["lambda"] = r.lambda;
  j["J"] = r.J_value;
  j["Q"] = r.Q_value;
  j["pohozaev_residual"] = r.pohozaev_residual;
  j["grad_residual"] = r.grad_residual;
  j["iters"] = r.iters;
  j["converged"] = r.converged;
  j["note"] = r.note;
  const auto b = breakdown(r.field, prm.p);
  j["breakdown"] = {{"grad2", b.grad2}, {"grad4", b.grad4}, {"quasi", b.quasi},
                    {"pot", b.pot}, {"mass", b.mass}};
  auto& ids = j["identities"] = nlohmann::ordered_json::array();
  for (const auto& id : identities)
    ids.push_back({{"name", id.name}, {"lhs", id.lhs}, {"rhs", id.rhs},
                   {"rel_residual", id.rel_residual}, {"tolerance", id.tolerance},
                   {"pass", id.pass}, {"skipped", id.skipped}});
  Params fp = prm;
  fp.mu = r.mu;
  j["solution"] = format_solution(r.field, fp);
  return j.dump(2) + "\n";
}

std::string shot_csv(const ShotResult& s) {
  std::ostringstream os;
  os.precision(12);
  os << "r,v,dv\n";
  for (int i = 0; i < s.grid->size(); ++i) os << s.grid->r[i] << ',' << s.v[i] << ',' << s.dv[i] << '\n';
  return os.str();
}

std::string decay_csv(const DecayReport& d) {
  std::ostringstream os;
  os.precision(12);
  os << "r,a,b,A\n";
  for (size_t i = 0; i < d.r.size(); ++i)
    os << d.r[i] << ',' << d.a_r[i] << ',' << d.b_r[i] << ',' << d.A_r[i] << '\n';
  return os.str();
}

std::string svg_plot(const std::vector<Series>& series, const PlotOptions& opt) {
  const double L = 70, Rm = 20, T = 40, B = 50;
  const double W = opt.width - L - Rm, H = opt.height - T - B;
  auto tx = [&](double v) { return opt.logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return opt.logy ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!opt.logx || x > 0) && (!opt.logy || y > 0);
  };
  for (const auto& s : series)
    for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (usable(s.x[i], s.y[i])) {
        x0 = std::min(x0, tx(s.x[i]));
        x1 = std::max(x1, tx(s.x[i]));
        y0 = std::min(y0, ty(s.y[i]));
        y1 = std::max(y1, ty(s.y[i]));
      }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (tx(x) - x0) / (x1 - x0) * W; };
  auto py = [&](double y) { return T + H - (ty(y) - y0) / (y1 - y0) * H; };
  auto label = [](double v, bool lg) { return num(lg ? std::pow(10.0, v) : v).substr(0, 10); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W << "\" height=\"" << H
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << opt.width / 2 << "\" y=\"24\" text-anchor=\"middle\">" << opt.title << "</text>\n";
  os << "<text x=\"" << L + W / 2 << "\" y=\"" << opt.height - 10 << "\" text-anchor=\"middle\">"
     << opt.xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << T + H / 2 << "\" transform=\"rotate(-90 16 " << T + H / 2
     << ")\" text-anchor=\"middle\">" << opt.ylabel << "</text>\n";
  os << "<text x=\"" << L << "\" y=\"" << T + H + 16 << "\">" << label(x0, opt.logx) << "</text>\n";
  os << "<text x=\"" << L + W << "\" y=\"" << T + H + 16 << "\" text-anchor=\"end\">"
     << label(x1, opt.logx) << "</text>\n";
  os << "<text x=\"" << L - 4 << "\" y=\"" << T + H << "\" text-anchor=\"end\">" << label(y0, opt.logy) << "</text>\n";
  os << "<text x=\"" << L - 4 << "\" y=\"" << T + 10 << "\" text-anchor=\"end\">" << label(y1, opt.logy) << "</text>\n";
  for (size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = colors[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (usable(s.x[i], s.y[i])) os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << L + W - 6 << "\" y=\"" << T + 16 + 14 * k << "\" text-anchor=\"end\" fill=\""
       << col << "\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace qlnorm
