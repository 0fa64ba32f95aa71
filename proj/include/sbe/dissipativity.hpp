#pragma once

#include <string>

#include "sbe/compiled.hpp"
#include "sbe/problem.hpp"

namespace sbe {

/// Sampled certificate for a dissipation inequality: sweeps all grid nodes
/// times control samples. margin(x,u) >= 0 means the inequality holds there.
struct DissipativityReport {
  bool pass = false;
  double worst_violation = 0.0;  // max(0, -min margin)
  std::vector<double> worst_x;
  double worst_u = 0.0;
  std::size_t samples = 0;
  double min_margin = 0.0;
  double mean_margin = 0.0;
  std::string to_json() const;
};

/// Checks lambda(f(x,u)) <= lambda(x) + l(x,u) - c on all samples.
DissipativityReport check_dissipativity(const CompiledProblem& cp, const StorageFn& lambda,
                                        double c, double tol = 1e-9);

/// Largest shift the storage certifies on the sampled set:
///   min over (x,u) of [ lambda(x) + l(x,u) - lambda(f(x,u)) ].
double best_certified_shift(const CompiledProblem& cp, const StorageFn& lambda);

/// Strict dissipativity with margin alpha(||x - xe||):
///   lambda(f(x,u)) <= lambda(x) + l(x,u) - l(xe,ue) - alpha(||x-xe||).
/// alpha is a one-variable expression evaluated at r = ||x - xe|| (supplied
/// through the x1 slot). Verifies the equilibrium and that alpha(0)=0 and
/// alpha is nondecreasing on the sampled radii.
DissipativityReport check_strict_dissipativity(const CompiledProblem& cp,
                                               const StorageFn& lambda,
                                               std::span<const double> xe, double ue,
                                               const Expr& alpha, double tol = 1e-9);

/// Terminal penalty psi = -lambda sampled on the grid.
GridFunction terminal_from_storage(GridPtr grid, const StorageFn& lambda);

}  // namespace sbe
