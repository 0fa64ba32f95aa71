#include "sbe/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sbe {

ProjectionResult project(std::span<const double> x, const Box& box) {
  ProjectionResult r;
  r.x.assign(x.begin(), x.end());
  for (std::size_t d = 0; d < box.size() && d < r.x.size(); ++d) {
    double lo = box[d][0], hi = box[d][1];
    double excess = 0.0;
    if (r.x[d] < lo) { excess = lo - r.x[d]; r.x[d] = lo; }
    else if (r.x[d] > hi) { excess = r.x[d] - hi; r.x[d] = hi; }
    r.worst_excess = std::max(r.worst_excess, excess);
  }
  r.clamped_beyond_tol = r.worst_excess > kProjectionTol;
  return r;
}

Grid::Grid(Box box, std::vector<std::vector<double>> axes)
    : box_(std::move(box)), axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() != box_.size())
    throw std::invalid_argument("grid: dimension mismatch between box and axes");
  if (dim() > kMaxDim) throw std::invalid_argument("grid: dimension exceeds limit");
  size_ = 1;
  for (std::size_t d = 0; d < axes_.size(); ++d) {
    const auto& a = axes_[d];
    if (a.size() < 2) throw std::invalid_argument("grid: need >= 2 nodes per dimension");
    for (std::size_t i = 1; i < a.size(); ++i)
      if (!(a[i] > a[i - 1]))
        throw std::invalid_argument("grid: nodes must be strictly increasing");
    if (a.front() != box_[d][0] || a.back() != box_[d][1])
      throw std::invalid_argument("grid: axis endpoints must equal the box bounds");
    size_ *= a.size();
  }
  strides_.assign(axes_.size(), 1);
  for (int d = dim() - 2; d >= 0; --d)
    strides_[d] = strides_[d + 1] * axes_[d + 1].size();
}

Grid Grid::build(const Box& box, std::span<const int> nodes_per_dim,
                 std::span<const std::vector<double>> mandatory) {
  if (box.empty()) throw std::invalid_argument("grid: empty box");
  std::vector<std::vector<double>> axes(box.size());
  for (std::size_t d = 0; d < box.size(); ++d) {
    double lo = box[d][0], hi = box[d][1];
    if (!(lo < hi)) throw std::invalid_argument("grid: degenerate box");
    int n = d < nodes_per_dim.size() ? nodes_per_dim[d] : 2;
    if (n < 2) throw std::invalid_argument("grid: need >= 2 nodes per dimension");
    std::vector<double>& a = axes[d];
    a.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      a.push_back(i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1));
    if (d < mandatory.size()) {
      for (double m : mandatory[d]) {
        if (m < lo || m > hi)
          throw std::invalid_argument("grid: mandatory point " + std::to_string(m) +
                                      " outside box");
        a.push_back(m);
      }
    }
    std::sort(a.begin(), a.end());
    // drop near-duplicates so mandatory points coinciding with uniform nodes
    // do not create degenerate cells
    double scale = std::max({1.0, std::fabs(lo), std::fabs(hi)});
    std::vector<double> dedup;
    dedup.reserve(a.size());
    for (double v : a)
      if (dedup.empty() || v - dedup.back() > 1e-12 * scale) dedup.push_back(v);
    dedup.front() = lo;
    dedup.back() = hi;
    a = std::move(dedup);
  }
  return Grid(box, std::move(axes));
}

std::size_t Grid::flat_index(std::span<const std::size_t> multi) const {
  std::size_t f = 0;
  for (int d = 0; d < dim(); ++d) f += multi[d] * strides_[d];
  return f;
}

std::vector<double> Grid::node(std::size_t flat) const {
  std::vector<double> x(dim());
  for (int d = 0; d < dim(); ++d) x[d] = coord(flat, d);
  return x;
}

std::pair<std::size_t, double> Grid::locate(int d, double v) const {
  const auto& a = axes_[d];
  if (v <= a.front()) return {0, 0.0};
  if (v >= a.back()) return {a.size() - 2, 1.0};
  auto it = std::upper_bound(a.begin(), a.end(), v);
  std::size_t cell = static_cast<std::size_t>(it - a.begin()) - 1;
  if (cell > a.size() - 2) cell = a.size() - 2;
  double frac = (v - a[cell]) / (a[cell + 1] - a[cell]);
  return {cell, frac};
}

bool Grid::same_layout(const Grid& other) const {
  return axes_ == other.axes_;
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size())
    throw std::invalid_argument("grid function: value count does not match grid");
}

GridFunction::GridFunction(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(grid_->size(), fill) {}

PreparedPoint prepare_point(const Grid& g, std::span<const double> x) {
  PreparedPoint p;
  for (int d = 0; d < g.dim(); ++d) {
    auto [cell, frac] = g.locate(d, x[d]);
    p.base += cell * g.stride(d);
    p.frac[d] = frac;
  }
  return p;
}

double interpolate_prepared(const Grid& g, std::span<const double> values,
                            const PreparedPoint& p) {
  const int n = g.dim();
  const unsigned corners = 1u << n;
  double acc = 0.0;
  for (unsigned c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = p.base;
    for (int d = 0; d < n; ++d) {
      if (c & (1u << d)) {
        w *= p.frac[d];
        idx += g.stride(d);
      } else {
        w *= 1.0 - p.frac[d];
      }
    }
    if (w != 0.0) acc += w * values[idx];
  }
  return acc;
}

double GridFunction::at(std::span<const double> x) const {
  ProjectionResult pr = project(x, grid_->box());
  PreparedPoint p = prepare_point(*grid_, pr.x);
  return interpolate_prepared(*grid_, values_, p);
}

double GridFunction::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double GridFunction::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

bool GridFunction::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace sbe
