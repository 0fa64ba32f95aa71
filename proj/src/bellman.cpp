#include "sbe/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbe {

ShiftPair shift_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("shift_pair: size mismatch");
  double mx = -std::numeric_limits<double>::infinity();
  double mn = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    mx = std::max(mx, d);
    mn = std::min(mn, d);
  }
  return {mx, mn};
}

ShiftPair shift_pair(const GridFunction& psi1, const GridFunction& psi2) {
  if (!psi1.grid().same_layout(psi2.grid()))
    throw std::invalid_argument("shift_pair: grid mismatch");
  return shift_pair(psi1.values(), psi2.values());
}

BellmanResult apply_T(const CompiledProblem& cp, const GridFunction& psi) {
  if (!psi.grid().same_layout(cp.grid()))
    throw std::invalid_argument("apply_T: psi not on the problem grid");
  GridFunction out(cp.grid_ptr(), 0.0);
  GridFunction arg(cp.grid_ptr(), 0.0);
  cp.bellman_sweep(psi.values(), out.values(), arg.values());
  return {std::move(out), std::move(arg)};
}

GridFunction apply_T_value(const CompiledProblem& cp, const GridFunction& psi) {
  if (!psi.grid().same_layout(cp.grid()))
    throw std::invalid_argument("apply_T: psi not on the problem grid");
  GridFunction out(cp.grid_ptr(), 0.0);
  cp.bellman_sweep(psi.values(), out.values(), {});
  return out;
}

namespace {

void require_undiscounted(const CompiledProblem& cp, const char* op) {
  if (cp.gamma() < 1.0)
    throw std::invalid_argument(std::string(op) +
                                ": shifted operators require an undiscounted problem");
}

GridFunction shifted_step(const CompiledProblem& cp, const GridFunction& psi,
                          double alpha, ShiftKind kind) {
  GridFunction t = apply_T_value(cp, psi);
  ShiftPair sp = shift_pair(psi, t);
  double shift = alpha * sp.max_diff + (1.0 - alpha) * sp.min_diff;
  GridFunction out(cp.grid_ptr(), 0.0);
  const auto p = psi.values();
  const auto tv = t.values();
  auto o = out.values();
  if (kind == ShiftKind::Min)
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::min(p[i], tv[i] + shift);
  else
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::max(p[i], tv[i] + shift);
  return out;
}

}  // namespace

GridFunction apply_T_hat(const CompiledProblem& cp, const GridFunction& psi) {
  require_undiscounted(cp, "apply_T_hat");
  return shifted_step(cp, psi, 0.5, ShiftKind::Min);
}

GridFunction apply_T_check(const CompiledProblem& cp, const GridFunction& psi) {
  require_undiscounted(cp, "apply_T_check");
  return shifted_step(cp, psi, 0.5, ShiftKind::Max);
}

GridFunction apply_alpha_shift(const CompiledProblem& cp, const GridFunction& psi,
                               double alpha, ShiftKind kind) {
  require_undiscounted(cp, "apply_alpha_shift");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("apply_alpha_shift: alpha must lie strictly in (0,1)");
  return shifted_step(cp, psi, alpha, kind);
}

GridFunction normalize(const GridFunction& psi) {
  GridFunction out = psi;
  double m = psi.min_value();
  for (double& v : out.values()) v -= m;
  return out;
}

ProblemSpec rotated_cost(const ProblemSpec& spec, const StorageFn& lambda, double c) {
  ProblemSpec out = spec;
  std::vector<Expr> dyn = spec.dynamics;
  StageCost base = spec.cost;
  out.cost = StageCost(
      [base, lambda, dyn, c](std::span<const double> x, double u) {
        std::vector<double> y(dyn.size());
        for (std::size_t i = 0; i < dyn.size(); ++i) y[i] = dyn[i].eval(x, u);
        return base(x, u) - c + eval_storage(lambda, x) - eval_storage(lambda, y);
      },
      "rotated(" + base.label() + ")");
  out.name = spec.name + "~rotated";
  out.storage.reset();
  out.shift_c = 0.0;
  return out;
}

ProblemSpec rotated_cost(const ProblemSpec& spec) {
  if (spec.storage && spec.shift_c)
    return rotated_cost(spec, *spec.storage, *spec.shift_c);
  if (spec.equilibrium) {
    double le = spec.stage(spec.equilibrium->x, spec.equilibrium->u);
    StorageFn lam = spec.storage ? StorageFn(*spec.storage) : StorageFn(Expr::parse("0"));
    return rotated_cost(spec, lam, le);
  }
  throw std::invalid_argument(
      "rotated_cost: problem carries neither (storage, shift_c) nor an equilibrium");
}

GridFunction apply_T_tilde(const CompiledProblem& rotated, const GridFunction& psi) {
  return apply_T_value(rotated, psi);
}

bool min_formula_check(const CompiledProblem& cp, const GridFunction& psi, int k,
                       double tol) {
  require_undiscounted(cp, "min_formula_check");
  if (k < 0 || k > 6)
    throw std::invalid_argument("min_formula_check: k must lie in [0, 6]");

  // left-hand side: T-hat^k psi; record the applied shifts c_s on the way
  std::vector<double> c_s;
  GridFunction hat = psi;
  for (int s = 0; s < k; ++s) {
    GridFunction t = apply_T_value(cp, hat);
    ShiftPair sp = shift_pair(hat, t);
    c_s.push_back(sp.c());
    GridFunction next(cp.grid_ptr(), 0.0);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = std::min(hat[i], t[i] + sp.c());
    hat = std::move(next);
  }

  // powers T^tau psi
  std::vector<GridFunction> powers;
  powers.push_back(psi);
  for (int t = 1; t <= k; ++t) powers.push_back(apply_T_value(cp, powers.back()));

  // best shift sum per subset size, by full enumeration over subsets of
  // {0,...,k-1}
  std::vector<double> best(static_cast<std::size_t>(k) + 1,
                           std::numeric_limits<double>::infinity());
  best[0] = 0.0;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    double sum = 0.0;
    int bits = 0;
    for (int s = 0; s < k; ++s)
      if (mask & (1u << s)) { sum += c_s[s]; ++bits; }
    best[bits] = std::min(best[bits], sum);
  }

  double worst = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    double rhs = std::numeric_limits<double>::infinity();
    for (int tau = 0; tau <= k; ++tau) rhs = std::min(rhs, powers[tau][i] + best[tau]);
    worst = std::max(worst, std::fabs(hat[i] - rhs));
  }
  return worst <= tol;
}

}  // namespace sbe
