#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace sbe {

inline constexpr double kProjectionTol = 1e-6;  // epsilon_proj
inline constexpr int kMaxDim = 9;

using Box = std::vector<std::array<double, 2>>;  // per-dimension [lo, hi]

struct ProjectionResult {
  std::vector<double> x;
  bool clamped_beyond_tol = false;
  double worst_excess = 0.0;
};

/// Componentwise clamp of x into the box; flags clamps beyond kProjectionTol.
ProjectionResult project(std::span<const double> x, const Box& box);

/// Rectilinear grid over a compact box. Node coordinates are strictly
/// increasing per dimension and the first/last node of each axis equals the
/// box bound. Immutable after construction.
class Grid {
 public:
  Grid(Box box, std::vector<std::vector<double>> axes);

  /// Uniform nodes per dimension augmented with mandatory points
  /// (deduplicated, sorted). Mandatory points outside the box are an error.
  static Grid build(const Box& box, std::span<const int> nodes_per_dim,
                    std::span<const std::vector<double>> mandatory);

  int dim() const { return static_cast<int>(axes_.size()); }
  std::size_t size() const { return size_; }
  const Box& box() const { return box_; }
  const std::vector<double>& axis(int d) const { return axes_[d]; }
  std::size_t stride(int d) const { return strides_[d]; }

  std::size_t flat_index(std::span<const std::size_t> multi) const;
  /// Coordinate of node `flat` along dimension d.
  double coord(std::size_t flat, int d) const {
    return axes_[d][(flat / strides_[d]) % axes_[d].size()];
  }
  std::vector<double> node(std::size_t flat) const;

  /// Cell location along axis d for coordinate v (clamped to the box):
  /// returns {cell index in [0, n_d-2], fractional position in [0, 1]}.
  std::pair<std::size_t, double> locate(int d, double v) const;

  bool same_layout(const Grid& other) const;

 private:
  Box box_;
  std::vector<std::vector<double>> axes_;
  std::vector<std::size_t> strides_;  // row-major, last axis contiguous
  std::size_t size_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// One finite real per grid node with multilinear interpolation.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(GridPtr grid, std::vector<double> values);
  GridFunction(GridPtr grid, double fill);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  /// Multilinear interpolation at a point (projected into the box first).
  double at(std::span<const double> x) const;
  double at(std::initializer_list<double> x) const {
    return at(std::span<const double>(x.begin(), x.size()));
  }

  double min_value() const;
  double max_value() const;
  bool all_finite() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Interpolation stencil prepared once for a fixed query point: flat index of
/// the lower cell corner plus per-dimension fractional offsets.
struct PreparedPoint {
  std::size_t base = 0;
  std::array<double, kMaxDim> frac{};
};

PreparedPoint prepare_point(const Grid& g, std::span<const double> x);
double interpolate_prepared(const Grid& g, std::span<const double> values,
                            const PreparedPoint& p);

}  // namespace sbe
