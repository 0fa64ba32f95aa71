#include "sbe/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbe {

namespace {

// minimum over control samples at `node` of stage + gamma * E, where E
// recursively expands the stencil corners of f(node, u) at depth-1 values
double expand(const CompiledProblem& cp, std::span<const double> psi,
              std::size_t node, int depth) {
  if (depth == 0) return psi[node];
  const int n = cp.grid().dim();
  const std::size_t count = cp.controls_at(node).size();
  const std::uint64_t first = cp.sample_begin(node);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < count; ++s) {
    std::size_t sample = first + s;
    // corner-by-corner expansion of the prepared interpolation
    double cont = 0.0;
    const unsigned corners = 1u << n;
    for (unsigned c = 0; c < corners; ++c) {
      double w = cp.corner_weight(sample, c);
      if (w == 0.0) continue;
      cont += w * expand(cp, psi, cp.corner_index(sample, c), depth - 1);
    }
    double v = cp.sample_stage(sample) + cp.gamma() * cont;
    if (v < best) best = v;
  }
  return best;
}

}  // namespace

GridFunction brute_force_value(const CompiledProblem& cp, const GridFunction& psi,
                               int k, double budget) {
  if (k < 0) throw std::invalid_argument("brute_force_value: k must be >= 0");
  if (!psi.grid().same_layout(cp.grid()))
    throw std::invalid_argument("brute_force_value: psi not on the problem grid");
  std::size_t max_samples = 0;
  for (std::size_t i = 0; i < cp.node_count(); ++i)
    max_samples = std::max(max_samples, cp.controls_at(i).size());
  double branch = static_cast<double>(max_samples) * std::pow(2.0, cp.grid().dim());
  if (std::pow(branch, k) > budget)
    throw std::invalid_argument("brute_force_value: enumeration budget exceeded");

  GridFunction out(cp.grid_ptr(), 0.0);
  for (std::size_t i = 0; i < cp.node_count(); ++i)
    out[i] = expand(cp, psi.values(), i, k);
  return out;
}

}  // namespace sbe
