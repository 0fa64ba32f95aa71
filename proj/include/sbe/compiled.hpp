#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbe/problem.hpp"

namespace sbe {

/// Control-invariance sweep summary produced while compiling a problem.
struct InvarianceReport {
  bool ok = true;
  double worst_excess = 0.0;
  std::vector<double> worst_x;
  double worst_u = 0.0;
  std::vector<double> worst_fx;
  std::size_t samples = 0;
};

/// A ProblemSpec bound to its grid with every per-sweep quantity
/// precomputed: control samples per node, stage costs, and the interpolation
/// stencil of f(x,u). One Bellman sweep is then a pure table pass, so
/// repeated operator applications do not re-evaluate any expression.
class CompiledProblem {
 public:
  explicit CompiledProblem(ProblemSpec spec);
  CompiledProblem(ProblemSpec spec, GridPtr grid);

  const ProblemSpec& spec() const { return spec_; }
  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  double gamma() const { return spec_.discount; }
  std::size_t node_count() const { return grid_->size(); }
  const InvarianceReport& invariance() const { return invariance_; }

  std::span<const double> controls_at(std::size_t node) const {
    return {u_.data() + offset_[node], offset_[node + 1] - offset_[node]};
  }
  std::span<const double> stage_at(std::size_t node) const {
    return {stage_.data() + offset_[node], offset_[node + 1] - offset_[node]};
  }

  /// One Bellman sweep: out[i] = min_u stage(x_i,u) + gamma * psi(f(x_i,u)).
  /// Ties break toward the smallest sampled control. argmin may be empty.
  void bellman_sweep(std::span<const double> psi, std::span<double> out,
                     std::span<double> argmin) const;

  /// Continuation value psi(f(x,u)) for one precomputed sample.
  double continuation(std::size_t sample, std::span<const double> psi) const;

  std::size_t sample_count() const { return u_.size(); }
  std::uint64_t sample_begin(std::size_t node) const { return offset_[node]; }
  double sample_u(std::size_t sample) const { return u_[sample]; }
  double sample_stage(std::size_t sample) const { return stage_[sample]; }

  /// Stencil corner access for sample s; corner bits select the upper node
  /// per dimension. Weight is the multilinear coefficient of that corner.
  double corner_weight(std::size_t sample, unsigned corner) const;
  std::size_t corner_index(std::size_t sample, unsigned corner) const;

 private:
  void compile();

  ProblemSpec spec_;
  GridPtr grid_;
  InvarianceReport invariance_;

  std::vector<std::uint64_t> offset_;  // node -> [offset_[i], offset_[i+1]) samples
  std::vector<double> u_;              // control value per sample
  std::vector<double> stage_;          // stage cost per sample
  std::vector<std::uint32_t> base_;    // stencil base node per sample
  std::vector<double> frac_;           // dim fractions per sample
  std::vector<std::size_t> strides_;   // grid strides cached
};

}  // namespace sbe
