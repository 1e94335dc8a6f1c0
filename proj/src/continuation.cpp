#include "qlnorm/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qlnorm/error.hpp"

namespace qlnorm {

namespace {

ContinuationRow make_row(const SolveReport& r, double mu, double p, bool warm) {
  const auto b = breakdown(r.field, p);
  return {mu, J_mu(b, mu, p), mu * b.grad4, r.lambda, b.mass, b.grad2, b.quasi, b.pot,
          r.converged, warm};
}

SolveReport solve_min(Classification kind, const Params& prm, GridPtr grid, double k0,
                      const ContinuationConfig& cfg, const RadialField& start) {
  if (kind == Classification::GlobalMin) return global_minimize(prm, grid, cfg.flow, start);
  return minimize_local(prm, k0, cfg.flow, start);
}

bool row_ok(Classification kind, const SolveReport& r, bool first) {
  if (kind == Classification::MountainPass && !first) return r.converged;
  return r.converged && r.classification == kind;
}

}  // namespace

std::vector<double> mu_schedule(double mu0, double factor, double mu_min) {
  if (!(factor > 0.0 && factor < 1.0))
    throw Error(ErrorKind::InvalidConfig, "schedule factor must lie in (0, 1)");
  if (!(mu_min > 0.0) || !(mu0 >= mu_min))
    throw Error(ErrorKind::InvalidConfig, "schedule needs mu0 >= mu_min > 0");
  const int steps = static_cast<int>(std::ceil(std::log(mu0 / mu_min) / std::log(1.0 / factor) - 1e-9));
  std::vector<double> out;
  for (int k = 0; k < steps; ++k) out.push_back(mu0 * std::pow(factor, k));
  out.push_back(mu_min);
  return out;
}

std::string ContinuationTrace::csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "mu,J,mu_grad4,lambda,mass,grad2,quasi,pot,status,warm\n";
  for (const auto& r : rows)
    os << r.mu << ',' << r.J << ',' << r.mu_grad4 << ',' << r.lambda << ',' << r.mass << ','
       << r.grad2 << ',' << r.quasi << ',' << r.pot << ','
       << (r.converged ? "converged" : "not-converged") << ',' << (r.warm ? 1 : 0) << '\n';
  return os.str();
}

ContinuationTrace continue_solve(Classification kind, const Params& prm, GridPtr grid,
                                 const std::vector<double>& schedule,
                                 const ContinuationConfig& cfg) {
  if (kind == Classification::Failed)
    throw Error(ErrorKind::InvalidConfig, "continuation needs a solution kind");
  if (schedule.empty()) throw Error(ErrorKind::InvalidConfig, "empty schedule");
  for (size_t k = 1; k < schedule.size(); ++k)
    if (!(schedule[k] < schedule[k - 1]))
      throw Error(ErrorKind::InvalidConfig, "schedule must be strictly decreasing");
  prm.validate();

  ContinuationTrace tr;
  tr.kind = kind;
  tr.params = prm;
  Params p0 = prm;
  p0.mu = schedule.front();

  RadialField start;
  if (cfg.init) {
    start = normalize_mass(*cfg.init, prm.c);
  } else if (kind == Classification::GlobalMin) {
    start = default_guess(p0, grid);
  } else {
    Params big = p0;
    big.c = 1.5 * prm.c;
    start = normalize_mass(global_minimize(big, grid, cfg.flow).field, prm.c);
  }
  if (kind != Classification::GlobalMin) tr.k0 = calibrate_k0(p0, grid, cfg.probes, cfg.seed);

  RadialField current;
  for (size_t k = 0; k < schedule.size(); ++k) {
    Params pk = prm;
    pk.mu = schedule[k];
    SolveReport r;
    bool warm = k > 0;
    try {
      if (kind == Classification::MountainPass) {
        if (k == 0) {
          Params pm = p0;
          const SolveReport mn = minimize_local(pm, tr.k0, cfg.flow, start);
          const SolveReport gm = global_minimize(pm, grid, cfg.flow, start);
          const SolveReport& base = gm.classification == Classification::GlobalMin ? gm : mn;
          if (!base.converged) throw Error(ErrorKind::Divergence, "no minimum to start the mountain pass from");
          auto ring = ring_samples(probe_family(grid, cfg.probes, cfg.seed), pm, tr.k0, tr.k0, 1);
          double floor = std::numeric_limits<double>::infinity();
          for (const auto& s : ring) floor = std::min(floor, s.J);
          tr.reference_J = J_mu(breakdown(base.field, prm.p), 0.0, prm.p);
          MPReport mp = mountain_pass(pm, tr.k0, base.field, floor, cfg.mpass);
          tr.path_values = mp.path_values;
          tr.max_history = mp.max_history;
          r = std::move(mp.peak);
        } else {
          r = newton_refine(current, pk, cfg.newton);
        }
      } else {
        const RadialField& from = k == 0 ? start : current;
        r = solve_min(kind, pk, grid, tr.k0, cfg, from);
        if (k > 0) {
          // Warm start must not lose to the cold default start.
          const RadialField cold = default_guess(pk, grid);
          const double Jw = J_mu(breakdown(current, prm.p), pk.mu, prm.p);
          const double Jc = J_mu(breakdown(cold, prm.p), pk.mu, prm.p);
          if (Jw > Jc && kind == Classification::GlobalMin) {
            r = solve_min(kind, pk, grid, tr.k0, cfg, cold);
            warm = false;
          }
        }
      }
    } catch (const Error& e) {
      tr.truncated = true;
      tr.error = e.kind();
      tr.note = "row mu=" + std::to_string(pk.mu) + ": " + e.what();
      break;
    }
    tr.rows.push_back(make_row(r, pk.mu, prm.p, warm));
    if (r.lambda >= 0.0) tr.nonnegative_multiplier = true;
    if (!row_ok(kind, r, k == 0)) {
      tr.truncated = true;
      tr.note = "row mu=" + std::to_string(pk.mu) + " did not converge";
      break;
    }
    current = r.field;
    tr.final_field = current;
  }
  return tr;
}

bool is_nonincreasing(const RadialField& u, double slack) {
  const double tol = slack * u.u.cwiseAbs().maxCoeff();
  for (int i = 1; i < u.u.size(); ++i)
    if (u.u[i] > u.u[i - 1] + tol) return false;
  return true;
}

SolveReport classify_limit(const ContinuationTrace& trace, double grad_tol) {
  if (!trace.final_field || trace.truncated)
    throw Error(ErrorKind::InvalidConfig, "trace did not reach the end of its schedule");
  Params p = trace.params;
  p.mu = 0.0;
  const RadialField& u = *trace.final_field;
  SolveReport r = make_report(u, p, 0, trace.rows.back().converged, Classification::Failed, grad_tol);
  std::string why;
  if (!(r.lambda < 0.0)) why += "multiplier is not negative; ";
  if (!is_nonincreasing(u)) why += "profile is not non-increasing; ";
  switch (trace.kind) {
    case Classification::GlobalMin:
      if (!(r.J_value < 0.0)) why += "global minimum with J >= 0; ";
      break;
    case Classification::LocalMin:
      if (!(r.J_value > 0.0)) why += "local minimum with J <= 0; ";
      break;
    case Classification::MountainPass:
      if (!(r.J_value > 0.0)) why += "mountain pass with J <= 0; ";
      if (trace.reference_J && !(r.J_value > *trace.reference_J))
        why += "mountain pass not above the minimum; ";
      break;
    case Classification::Failed:
      break;
  }
  if (why.empty()) {
    r.classification = trace.kind;
  } else {
    why.resize(why.size() - 2);
    r.note = "misclassification: " + why;
  }
  return r;
}

}  // namespace qlnorm
