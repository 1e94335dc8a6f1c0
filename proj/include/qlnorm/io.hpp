#pragma once

#include <string>
#include <vector>

#include "qlnorm/diagnostics.hpp"
#include "qlnorm/flow.hpp"
#include "qlnorm/model.hpp"
#include "qlnorm/shoot.hpp"

namespace qlnorm {

// Plain-text solution file: N=, p=, c=, mu=, R_max=, n= header lines followed by
// one "r value" pair per node.
struct SolutionFile {
  Params params;
  RadialField field;
};

std::string format_solution(const RadialField& u, const Params& prm);
// `source` names the input in parse errors.
SolutionFile parse_solution(const std::string& text, const std::string& source = "<input>");
SolutionFile read_solution(const std::string& path);
void write_solution(const std::string& path, const RadialField& u, const Params& prm);

// Writes to a sibling temporary file and renames it over the target.
void write_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// JSON document with the report scalars, identity results and the embedded solution file.
std::string report_json(const SolveReport& r, const Params& prm,
                        const std::vector<IdentityReport>& identities);

// Shooting profile CSV: r, v, v', and the tail quantities when available.
std::string shot_csv(const ShotResult& s);
std::string decay_csv(const DecayReport& d);

struct Series {
  std::string name;
  std::vector<double> x, y;
};
struct PlotOptions {
  std::string title;
  std::string xlabel = "x";
  std::string ylabel = "y";
  bool logx = false;
  bool logy = false;
  int width = 640;
  int height = 420;
};
// Polylines over a framed axis box with min/max tick labels.
std::string svg_plot(const std::vector<Series>& series, const PlotOptions& opt);

}  // namespace qlnorm
