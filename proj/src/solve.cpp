#include "sbe/solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace sbe {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Period2: return "period2";
    case SolveStatus::Diverged: return "diverged";
    case SolveStatus::MaxIter: return "maxiter";
  }
  return "?";
}

std::string to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::T: return "t";
    case OperatorKind::THat: return "t-hat";
    case OperatorKind::TCheck: return "t-check";
    case OperatorKind::AlphaMin: return "alpha-min";
    case OperatorKind::AlphaMax: return "alpha-max";
  }
  return "?";
}

OperatorKind operator_from_string(const std::string& s, double) {
  if (s == "t") return OperatorKind::T;
  if (s == "t-hat") return OperatorKind::THat;
  if (s == "t-check") return OperatorKind::TCheck;
  if (s == "alpha" || s == "alpha-max") return OperatorKind::AlphaMax;
  if (s == "alpha-min") return OperatorKind::AlphaMin;
  throw std::invalid_argument("unknown operator '" + s + "'");
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

void IterationTrace::write_csv(std::ostream& os) const {
  os << "k,c_k,W_k,sup_delta,min_diff,max_diff";
  if (has_V) os << ",V_k";
  os << "\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const TraceRow& r = rows[k];
    os << k << ',' << fmt17(r.c_k) << ',' << fmt17(r.W_k) << ',' << fmt17(r.sup_delta)
       << ',' << fmt17(r.min_diff) << ',' << fmt17(r.max_diff);
    if (has_V) os << ',' << fmt17(r.V_k);
    os << "\n";
  }
}

std::string SolveReport::to_json() const {
  nlohmann::json j;
  j["status"] = to_string(status);
  j["c_infty"] = c_infty;
  j["residual"] = residual;
  j["iterations"] = iterations;
  j["average_cost"] = average_cost_estimate(*this);
  j["bound_only"] = bound_only;
  return j.dump(2);
}

double lyapunov_V(const GridFunction& psi, const GridFunction& ref) {
  ShiftPair sp = shift_pair(psi, ref);
  return sp.max_diff - sp.min_diff;
}

std::pair<double, double> residual_shifted_BE(const CompiledProblem& cp,
                                              const GridFunction& psi) {
  GridFunction t = apply_T_value(cp, psi);
  ShiftPair sp = shift_pair(t, psi);  // extrema of T psi - psi
  return {sp.c(), sp.d()};
}

double average_cost_estimate(const SolveReport& report) { return -report.c_infty; }

GridFunction greedy_policy(const CompiledProblem& cp, const GridFunction& psi) {
  return apply_T(cp, psi).argmin_u;
}

SolveResult iterate(const CompiledProblem& cp, const GridFunction& psi0,
                    OperatorKind op, const SolveOptions& opts) {
  if (!psi0.grid().same_layout(cp.grid()))
    throw std::invalid_argument("iterate: psi0 not on the problem grid");
  if (!psi0.all_finite()) throw std::invalid_argument("iterate: psi0 not finite");
  if (op != OperatorKind::T && cp.gamma() < 1.0)
    throw std::invalid_argument("iterate: shifted operators require gamma = 1");
  double alpha = 0.5;
  if (op == OperatorKind::AlphaMin || op == OperatorKind::AlphaMax) {
    alpha = opts.alpha;
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("iterate: alpha must lie strictly in (0,1)");
  }
  const bool is_min = op == OperatorKind::THat || op == OperatorKind::AlphaMin;
  const bool plain_T = op == OperatorKind::T;

  auto t_start = std::chrono::steady_clock::now();

  SolveResult res;
  res.trace.has_V = opts.reference.has_value();

  GridFunction psi = psi0;
  GridFunction prev2 = psi0;  // psi_{k-1} for period-2 detection
  GridFunction t(cp.grid_ptr(), 0.0);
  double prev_c = std::numeric_limits<double>::quiet_NaN();
  SolveStatus status = SolveStatus::MaxIter;
  double last_c = 0.0;
  int steps = 0;

  for (int k = 0; k < opts.max_iter; ++k) {
    cp.bellman_sweep(psi.values(), t.values(), {});
    ShiftPair sp = shift_pair(psi, t);  // extrema of psi - T psi
    double c_k = sp.c();
    last_c = c_k;

    GridFunction next(cp.grid_ptr(), 0.0);
    if (plain_T) {
      std::copy(t.values().begin(), t.values().end(), next.values().begin());
    } else {
      double shift = alpha * sp.max_diff + (1.0 - alpha) * sp.min_diff;
      auto p = psi.values();
      auto tv = t.values();
      auto o = next.values();
      if (is_min)
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::min(p[i], tv[i] + shift);
      else
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::max(p[i], tv[i] + shift);
    }

    double sup_delta = sup_diff(next.values(), psi.values());
    steps = k + 1;

    if (opts.record_trace) {
      TraceRow row{c_k, sp.d(), sup_delta, sp.min_diff, sp.max_diff, 0.0};
      if (opts.reference) row.V_k = lyapunov_V(psi, *opts.reference);
      res.trace.rows.push_back(row);
    }

    // divergence: normalized range or drifting node minimum beyond the bound
    double mn = next.min_value(), mx = next.max_value();
    if (mx - mn > opts.divergence_bound || std::fabs(mn) > opts.divergence_bound) {
      psi = std::move(next);
      status = SolveStatus::Diverged;
      break;
    }

    if (plain_T && k >= 1) {
      ShiftPair p2 = shift_pair(next, prev2);
      ShiftPair p1 = shift_pair(next, psi);
      if (p2.d() <= opts.tol && p1.d() > 10.0 * opts.tol) {
        psi = std::move(next);
        status = SolveStatus::Period2;
        break;
      }
    }

    bool shift_stable = !plain_T && !std::isnan(prev_c) &&
                        std::fabs(c_k - prev_c) <= opts.tol;
    prev_c = c_k;
    bool value_stable = sup_delta <= opts.tol;
    prev2 = std::move(psi);
    psi = std::move(next);
    if (plain_T ? value_stable : (value_stable && shift_stable)) {
      status = SolveStatus::Converged;
      break;
    }
  }

  res.report.psi = std::move(psi);
  res.report.status = status;
  res.report.iterations = steps;
  auto [c_be, resid] = residual_shifted_BE(cp, res.report.psi);
  res.report.residual = resid;
  res.report.c_be = c_be;
  res.report.c_infty = last_c;
  res.report.bound_only = status != SolveStatus::Converged;
  if (status == SolveStatus::Converged && resid > opts.tol_residual)
    res.report.bound_only = true;
  res.report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

NormalizedResult iterate_normalized(const CompiledProblem& cp, const StorageFn& lambda,
                                    double c, const SolveOptions& opts) {
  if (cp.gamma() < 1.0)
    throw std::invalid_argument("iterate_normalized: requires gamma = 1");
  auto t_start = std::chrono::steady_clock::now();

  // rotated problem, for the monotonicity diagnostics of lem-style sequences
  ProblemSpec rotated = rotated_cost(cp.spec(), lambda, c);
  CompiledProblem rcp(rotated, cp.grid_ptr());

  GridPtr grid = cp.grid_ptr();
  std::vector<double> lam_nodes(grid->size());
  {
    std::vector<double> x(grid->dim());
    for (std::size_t i = 0; i < grid->size(); ++i) {
      for (int d = 0; d < grid->dim(); ++d) x[d] = grid->coord(i, d);
      lam_nodes[i] = eval_storage(lambda, x);
    }
  }

  NormalizedResult res;
  res.trace.has_V = opts.reference.has_value();

  GridFunction psi(grid, 0.0);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = -lam_nodes[i];
  psi = normalize(psi);

  auto rotated_view = [&](const GridFunction& f) {
    GridFunction r = f;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += lam_nodes[i];
    return normalize(r);
  };

  GridFunction t(grid, 0.0);
  SolveStatus status = SolveStatus::MaxIter;
  double prev_c = std::numeric_limits<double>::quiet_NaN();
  double last_c = 0.0;
  int steps = 0;

  GridFunction rot_prev = rotated_view(psi);

  for (int k = 0; k < opts.max_iter; ++k) {
    cp.bellman_sweep(psi.values(), t.values(), {});
    ShiftPair sp = shift_pair(psi, t);
    double c_k = sp.c();
    last_c = c_k;

    GridFunction next(grid, 0.0);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = std::min(psi[i], t[i] + c_k);
    next = normalize(next);

    double sup_delta = sup_diff(next.values(), psi.values());
    steps = k + 1;

    if (opts.record_trace) {
      TraceRow row{c_k, sp.d(), sup_delta, sp.min_diff, sp.max_diff, 0.0};
      if (opts.reference) row.V_k = lyapunov_V(psi, *opts.reference);
      res.trace.rows.push_back(row);
    }

    // rotated-problem diagnostics: step monotonicity and T~ psi~ >= psi~
    GridFunction rot_next = rotated_view(next);
    double step_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rot_next.size(); ++i)
      step_min = std::min(step_min, rot_next[i] - rot_prev[i]);
    res.rotated_step_min.push_back(step_min);
    GridFunction rt(grid, 0.0);
    rcp.bellman_sweep(rot_prev.values(), rt.values(), {});
    double gap_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rt.size(); ++i)
      gap_min = std::min(gap_min, rt[i] - rot_prev[i]);
    res.rotated_gap_min.push_back(gap_min);
    rot_prev = std::move(rot_next);

    double mn = next.min_value(), mx = next.max_value();
    if (mx - mn > opts.divergence_bound || std::fabs(mn) > opts.divergence_bound) {
      psi = std::move(next);
      status = SolveStatus::Diverged;
      break;
    }
    bool shift_stable = !std::isnan(prev_c) && std::fabs(c_k - prev_c) <= opts.tol;
    prev_c = c_k;
    psi = std::move(next);
    if (sup_delta <= opts.tol && shift_stable) {
      status = SolveStatus::Converged;
      break;
    }
  }

  res.report.psi = std::move(psi);
  res.report.status = status;
  res.report.iterations = steps;
  auto [c_be, resid] = residual_shifted_BE(cp, res.report.psi);
  res.report.residual = resid;
  res.report.c_be = c_be;
  res.report.c_infty = -c_be;
  res.report.bound_only = status != SolveStatus::Converged;
  res.report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  (void)last_c;
  return res;
}

}  // namespace sbe
