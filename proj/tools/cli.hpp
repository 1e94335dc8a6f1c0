#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qlnorm::cli {

enum Exit { kOk = 0, kConfig = 2, kConvergence = 3, kIdentity = 4 };

// Layered key=value settings: defaults < config file < QLNORM_* environment < flags.
using Settings = std::map<std::string, std::string>;

Settings default_settings();
// Parses "key = value" lines; '#' starts a comment. Throws Error(Parse) with a line number.
Settings parse_config_text(const std::string& text, const std::string& source);
// QLNORM_GRID_N -> grid-n for every known key present in the environment.
Settings settings_from_env();
void overlay(Settings& base, const Settings& top);

struct RunConfig {
  std::string command;
  int N = 3;
  double p = 3.0;
  double c = 1.0;
  double mu0 = 0.0;
  double mu_min = 1e-6;
  double mu_factor = 0.1;
  int grid_n = 2000;
  std::optional<double> r_max;  // empty: start at 40 and grow while the tail is not negligible
  std::string kind = "global-min";
  int jobs = 1;
  std::uint64_t seed = 1;
  std::string out = "qlnorm-out";
  std::vector<double> c_list;
  std::string solution;
  int probes = 60;
  bool bisect = false;
  double grad_tol = 1e-8;
  double newton_tol = 1e-10;
};

// Typed view of resolved settings; throws Error(InvalidConfig) on bad values.
RunConfig resolve(const std::string& command, const Settings& s);

int cmd_solve(const RunConfig& cfg);
int cmd_scan(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);
int cmd_decay(const RunConfig& cfg);

// Full entry point: parses arguments, layers settings, dispatches.
int run(int argc, const char* const* argv);

}  // namespace qlnorm::cli
