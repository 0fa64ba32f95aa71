#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbe/bellman.hpp"
#include "sbe/compiled.hpp"

namespace sbe {

enum class OperatorKind { T, THat, TCheck, AlphaMin, AlphaMax };
enum class SolveStatus { Converged, Period2, Diverged, MaxIter };

std::string to_string(SolveStatus s);
std::string to_string(OperatorKind k);
OperatorKind operator_from_string(const std::string& s, double alpha_hint);

struct SolveOptions {
  double tol = 1e-9;            // sup-delta (and shift stability for shifted ops)
  double tol_residual = 1e-8;
  int max_iter = 10000;
  double divergence_bound = 1e12;
  double alpha = 0.5;           // for the alpha-shift operators
  std::optional<GridFunction> reference;  // candidate fixed point for V_k
  bool record_trace = true;
};

/// One row per iteration step k: the applied shift c_k = c(psi_k, T psi_k),
/// the Lyapunov value W_k = d(psi_k, T psi_k), the update magnitude
/// ||psi_{k+1} - psi_k||_inf, the extrema of psi_k - T psi_k, and
/// (when a reference is supplied) V_k = range(psi_k - ref).
struct TraceRow {
  double c_k;
  double W_k;
  double sup_delta;
  double min_diff;
  double max_diff;
  double V_k = 0.0;
};

struct IterationTrace {
  std::vector<TraceRow> rows;
  bool has_V = false;
  void write_csv(std::ostream& os) const;
};

struct SolveReport {
  GridFunction psi;
  double c_infty = 0.0;   // limiting applied shift
  SolveStatus status = SolveStatus::MaxIter;
  double residual = 0.0;  // d(psi, T psi) of the final iterate
  double c_be = 0.0;      // shifted-BE constant of the final iterate
  int iterations = 0;
  double wall_time_s = 0.0;
  bool bound_only = false;
  std::string to_json() const;
};

struct SolveResult {
  SolveReport report;
  IterationTrace trace;
};

SolveResult iterate(const CompiledProblem& cp, const GridFunction& psi0,
                    OperatorKind op, const SolveOptions& opts = {});

/// Normalized recursion psi^{k+1} = (T-hat psi^k)^n started at (-lambda)^n.
/// Also records, per step, the monotonicity margins of the rotated-problem
/// sequence (psi^k + lambda)^n: min over nodes of the step increment and of
/// T~ psi~ - psi~ (both nonnegative when the dissipation inequality holds).
struct NormalizedResult {
  SolveReport report;
  IterationTrace trace;
  std::vector<double> rotated_step_min;
  std::vector<double> rotated_gap_min;
};

NormalizedResult iterate_normalized(const CompiledProblem& cp, const StorageFn& lambda,
                                    double c, const SolveOptions& opts = {});

/// Constant and residual of the shifted Bellman equation at psi:
/// c = midpoint of the extrema of T psi - psi, residual = d(psi, T psi).
std::pair<double, double> residual_shifted_BE(const CompiledProblem& cp,
                                              const GridFunction& psi);

/// -c_infty; equals the shifted-BE constant of the limit on converged runs.
/// On non-converged runs the value is only an upper bound on the optimal
/// average cost (report.bound_only is set).
double average_cost_estimate(const SolveReport& report);

/// Per-node minimizing control of l(x,u) + gamma*psi(f(x,u)).
GridFunction greedy_policy(const CompiledProblem& cp, const GridFunction& psi);

/// V(psi) = max(psi - ref) - min(psi - ref); zero iff the gap is constant.
double lyapunov_V(const GridFunction& psi, const GridFunction& ref);

}  // namespace sbe
