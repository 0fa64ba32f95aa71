#pragma once

#include "sbe/compiled.hpp"
#include "sbe/grid.hpp"
#include "sbe/problem.hpp"

namespace sbe {

/// Extrema of psi1 - psi2 over grid nodes. c is the translation minimizing
/// the sup-norm gap and d the residual half-range:
///   c = (max + min)/2,   d = (max - min)/2 = || psi1 - psi2 - c ||_inf.
struct ShiftPair {
  double max_diff;
  double min_diff;
  double c() const { return 0.5 * max_diff + 0.5 * min_diff; }
  double d() const { return 0.5 * max_diff - 0.5 * min_diff; }
};

ShiftPair shift_pair(const GridFunction& psi1, const GridFunction& psi2);
ShiftPair shift_pair(std::span<const double> a, std::span<const double> b);

struct BellmanResult {
  GridFunction value;
  GridFunction argmin_u;
};

/// T psi (x) = min_u  l(x,u) + gamma * psi(f(x,u)), with deterministic
/// tie-break toward the smallest sampled control.
BellmanResult apply_T(const CompiledProblem& cp, const GridFunction& psi);
GridFunction apply_T_value(const CompiledProblem& cp, const GridFunction& psi);

enum class ShiftKind { Min, Max };

/// Min-shifted operator: min{ psi, T psi + c(psi, T psi) }. Requires gamma=1.
GridFunction apply_T_hat(const CompiledProblem& cp, const GridFunction& psi);
/// Max-shifted operator: max{ psi, T psi + c(psi, T psi) }. Requires gamma=1.
GridFunction apply_T_check(const CompiledProblem& cp, const GridFunction& psi);
/// Generalized shift c~ = alpha*max + (1-alpha)*min with alpha in (0,1);
/// alpha = 1/2 reproduces the plain shifted operators.
GridFunction apply_alpha_shift(const CompiledProblem& cp, const GridFunction& psi,
                               double alpha, ShiftKind kind);

/// psi^n = psi - min psi (exact zero minimum; translation invariant).
GridFunction normalize(const GridFunction& psi);

/// Rotated stage cost l~(x,u) = l(x,u) - c + lambda(x) - lambda(f(x,u)).
/// Uses (spec.storage, spec.shift_c) when present; an equilibrium with
/// c := l(xe,ue) is the fallback. Everything else is copied unchanged.
ProblemSpec rotated_cost(const ProblemSpec& spec);
ProblemSpec rotated_cost(const ProblemSpec& spec, const StorageFn& lambda, double c);

/// T~ of the rotated problem (compiled separately by the caller via
/// rotated_cost + CompiledProblem). Identity: T~psi = T(psi - lambda) + lambda - c.
GridFunction apply_T_tilde(const CompiledProblem& rotated, const GridFunction& psi);

/// Direct verification of the subset-sum expansion of T-hat^k by full
/// enumeration (correctness oracle; k is guarded at 6).
bool min_formula_check(const CompiledProblem& cp, const GridFunction& psi, int k,
                       double tol = 1e-9);

}  // namespace sbe
