#include "sbe/compiled.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sbe {

CompiledProblem::CompiledProblem(ProblemSpec spec)
    : spec_(std::move(spec)) {
  spec_.validate();
  grid_ = spec_.make_grid();
  compile();
}

CompiledProblem::CompiledProblem(ProblemSpec spec, GridPtr grid)
    : spec_(std::move(spec)), grid_(std::move(grid)) {
  spec_.validate();
  compile();
}

void CompiledProblem::compile() {
  const Grid& g = *grid_;
  const int n = g.dim();
  const std::size_t nodes = g.size();
  strides_.resize(n);
  for (int d = 0; d < n; ++d) strides_[d] = g.stride(d);

  offset_.assign(nodes + 1, 0);
  u_.clear();
  stage_.clear();
  base_.clear();
  frac_.clear();

  std::vector<double> samples;
  std::vector<double> x(n), y;
  for (std::size_t i = 0; i < nodes; ++i) {
    for (int d = 0; d < n; ++d) x[d] = g.coord(i, d);

    double lo = spec_.control.lo.eval(x, 0.0);
    double hi = spec_.control.hi.eval(x, 0.0);
    if (!(lo <= hi + 1e-12))
      throw std::runtime_error("control interval empty at a grid node (lo > hi)");
    samples.clear();
    int ns = spec_.control.samples;
    if (hi == lo || ns == 1) {
      samples.push_back(lo);
    } else {
      for (int k = 0; k < ns; ++k)
        samples.push_back(k == ns - 1 ? hi : lo + (hi - lo) * k / (ns - 1));
    }
    for (double m : spec_.control.mandatory)
      if (m >= lo - 1e-12 && m <= hi + 1e-12)
        samples.push_back(std::clamp(m, lo, hi));
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end(),
                              [&](double a, double b) {
                                return std::fabs(a - b) <=
                                       1e-12 * std::max(1.0, std::fabs(hi - lo));
                              }),
                  samples.end());

    for (double uu : samples) {
      double cost = spec_.stage(x, uu);
      if (!std::isfinite(cost))
        throw std::runtime_error("stage cost not finite at a sampled (x,u)");
      y = spec_.f(x, uu);
      for (double v : y)
        if (!std::isfinite(v))
          throw std::runtime_error("dynamics not finite at a sampled (x,u)");
      ProjectionResult pr = project(y, spec_.box);
      invariance_.samples++;
      if (pr.worst_excess > invariance_.worst_excess) {
        invariance_.worst_excess = pr.worst_excess;
        invariance_.worst_x = x;
        invariance_.worst_u = uu;
        invariance_.worst_fx = y;
      }
      PreparedPoint p = prepare_point(g, pr.x);
      u_.push_back(uu);
      stage_.push_back(cost);
      base_.push_back(static_cast<std::uint32_t>(p.base));
      for (int d = 0; d < n; ++d) frac_.push_back(p.frac[d]);
    }
    offset_[i + 1] = u_.size();
  }
  invariance_.ok = invariance_.worst_excess <= kProjectionTol;
}

double CompiledProblem::corner_weight(std::size_t sample, unsigned corner) const {
  const int n = static_cast<int>(strides_.size());
  const double* fr = frac_.data() + sample * n;
  double w = 1.0;
  for (int d = 0; d < n; ++d) w *= (corner & (1u << d)) ? fr[d] : 1.0 - fr[d];
  return w;
}

std::size_t CompiledProblem::corner_index(std::size_t sample, unsigned corner) const {
  const int n = static_cast<int>(strides_.size());
  std::size_t idx = base_[sample];
  for (int d = 0; d < n; ++d)
    if (corner & (1u << d)) idx += strides_[d];
  return idx;
}

double CompiledProblem::continuation(std::size_t s, std::span<const double> psi) const {
  const int n = static_cast<int>(strides_.size());
  const double* fr = frac_.data() + s * n;
  std::size_t base = base_[s];
  if (n == 1) {
    double f0 = fr[0];
    return (1.0 - f0) * psi[base] + f0 * psi[base + strides_[0]];
  }
  if (n == 2) {
    double f0 = fr[0], f1 = fr[1];
    std::size_t s0 = strides_[0];
    double lo = (1.0 - f1) * psi[base] + f1 * psi[base + 1];
    double hi = (1.0 - f1) * psi[base + s0] + f1 * psi[base + s0 + 1];
    return (1.0 - f0) * lo + f0 * hi;
  }
  double acc = 0.0;
  const unsigned corners = 1u << n;
  for (unsigned c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = base;
    for (int d = 0; d < n; ++d) {
      if (c & (1u << d)) { w *= fr[d]; idx += strides_[d]; }
      else w *= 1.0 - fr[d];
    }
    if (w != 0.0) acc += w * psi[idx];
  }
  return acc;
}

void CompiledProblem::bellman_sweep(std::span<const double> psi, std::span<double> out,
                                    std::span<double> argmin) const {
  const std::size_t nodes = grid_->size();
  if (psi.size() != nodes || out.size() != nodes)
    throw std::invalid_argument("bellman sweep: size mismatch");
  const double g = spec_.discount;
  for (std::size_t i = 0; i < nodes; ++i) {
    const std::uint64_t s0 = offset_[i], s1 = offset_[i + 1];
    double best = std::numeric_limits<double>::infinity();
    double best_u = u_[s0];
    for (std::uint64_t s = s0; s < s1; ++s) {
      double v = stage_[s] + g * continuation(s, psi);
      if (v < best) {  // strict: first (smallest) control wins ties
        best = v;
        best_u = u_[s];
      }
    }
    out[i] = best;
    if (!argmin.empty()) argmin[i] = best_u;
  }
}

}  // namespace sbe
