#pragma once

#include "sbe/compiled.hpp"

namespace sbe {

/// Independent finite-horizon evaluator: expands the Bellman minimum
/// recursively over every control sample and every interpolation-stencil
/// corner instead of sweeping value arrays, so it replays the exact
/// projection/interpolation pipeline of the dynamic-programming path. Meant
/// for coarse problems; throws when (samples * 2^dim)^k exceeds the budget.
GridFunction brute_force_value(const CompiledProblem& cp, const GridFunction& psi,
                               int k, double budget = 5e7);

}  // namespace sbe
