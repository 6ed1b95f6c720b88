#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "degenfd/error.hpp"

namespace degenfd {

/// Largest supported spatial dimension. Stencil scratch buffers are sized by it.
inline constexpr std::size_t kMaxDim = 6;

enum class NodeKind : std::uint8_t { Interior, Boundary };

/// Uniform lattice on an axis-aligned box [lower, upper].
///
/// Nodes are indexed row-major over the axes in declared order: the last axis
/// varies fastest, so in 2D the node (i, j) has index i * n_1 + j. A node is
/// Interior when every coordinate lies strictly inside the box and Boundary
/// otherwise.
///
/// Grid is immutable and cheap to copy (shared storage).
class Grid {
 public:
  Grid() = default;

  std::size_t dim() const noexcept { return data_->lower.size(); }
  double h() const noexcept { return data_->h; }
  std::span<const double> lower() const noexcept { return data_->lower; }
  std::span<const double> upper() const noexcept { return data_->upper; }
  std::span<const std::size_t> nodes_per_axis() const noexcept { return data_->counts; }
  std::size_t stride(std::size_t axis) const noexcept { return data_->strides[axis]; }
  std::size_t size() const noexcept { return data_->kinds.size(); }

  NodeKind kind(std::size_t node) const noexcept { return data_->kinds[node]; }
  bool is_interior(std::size_t node) const noexcept {
    return data_->kinds[node] == NodeKind::Interior;
  }
  std::span<const std::size_t> interior_nodes() const noexcept { return data_->interior; }
  std::span<const std::size_t> boundary_nodes() const noexcept { return data_->boundary; }

  std::size_t axis_index(std::size_t node, std::size_t axis) const noexcept {
    return (node / data_->strides[axis]) % data_->counts[axis];
  }
  double coordinate(std::size_t node, std::size_t axis) const noexcept {
    return data_->lower[axis] + static_cast<double>(axis_index(node, axis)) * data_->h;
  }
  std::vector<double> point(std::size_t node) const {
    std::vector<double> x(dim());
    for (std::size_t a = 0; a < dim(); ++a) x[a] = coordinate(node, a);
    return x;
  }

  /// Indices of x - h e_axis and x + h e_axis.
  std::pair<std::size_t, std::size_t> neighbors(std::size_t node, std::size_t axis) const {
    if (node >= size()) throw StencilError("node index out of range", node);
    if (axis >= dim()) throw InputError("axis " + std::to_string(axis) + " out of range");
    if (!is_interior(node)) throw StencilError("neighbors requested at a boundary node", node);
    const std::size_t s = data_->strides[axis];
    return {node - s, node + s};
  }

  bool same_as(const Grid& other) const noexcept {
    if (data_ == other.data_) return true;
    return data_->h == other.data_->h && data_->lower == other.data_->lower &&
           data_->upper == other.data_->upper;
  }

  friend Grid build_grid(std::vector<double> lower, std::vector<double> upper, double h);

 private:
  struct Data {
    std::vector<double> lower, upper;
    double h = 0.0;
    std::vector<std::size_t> counts, strides;
    std::vector<NodeKind> kinds;
    std::vector<std::size_t> interior, boundary;
  };
  std::shared_ptr<const Data> data_;
};

/// Builds the lattice with spacing h on the box [lower, upper].
///
/// Each extent (upper[i] - lower[i]) / h must be within 1e-12 (relative) of
/// an integer >= 2, so that every axis has at least one interior node.
inline Grid build_grid(std::vector<double> lower, std::vector<double> upper, double h) {
  if (lower.empty() || lower.size() != upper.size())
    throw InputError("lower and upper must be non-empty and of equal dimension");
  if (lower.size() > kMaxDim)
    throw InputError("dimension " + std::to_string(lower.size()) + " exceeds the supported maximum " +
                     std::to_string(kMaxDim));
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("grid spacing h must be positive");

  auto d = std::make_shared<Grid::Data>();
  const std::size_t dim = lower.size();
  d->counts.resize(dim);
  d->strides.resize(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    if (!std::isfinite(lower[a]) || !std::isfinite(upper[a]) || !(lower[a] < upper[a]))
      throw GridError("box requires lower < upper", a);
    const double cells = (upper[a] - lower[a]) / h;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-12 * std::max(1.0, rounded))
      throw GridError("extent is not an integer multiple of h", a);
    if (rounded < 2.0) throw GridError("fewer than 3 nodes, no interior nodes", a);
    d->counts[a] = static_cast<std::size_t>(rounded) + 1;
  }
  std::size_t total = 1;
  for (std::size_t a = dim; a-- > 0;) {
    d->strides[a] = total;
    total *= d->counts[a];
  }
  d->lower = std::move(lower);
  d->upper = std::move(upper);
  d->h = h;
  d->kinds.resize(total);
  for (std::size_t n = 0; n < total; ++n) {
    bool interior = true;
    for (std::size_t a = 0; a < dim && interior; ++a) {
      const std::size_t k = (n / d->strides[a]) % d->counts[a];
      interior = k > 0 && k + 1 < d->counts[a];
    }
    d->kinds[n] = interior ? NodeKind::Interior : NodeKind::Boundary;
    (interior ? d->interior : d->boundary).push_back(n);
  }
  Grid g;
  g.data_ = std::move(d);
  return g;
}

/// Real values attached to every node of a grid.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(Grid grid, double fill = 0.0)
      : grid_(std::move(grid)), values_(grid_.size(), fill) {}
  GridFunction(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw InputError("grid function has " + std::to_string(values_.size()) + " values for " +
                       std::to_string(grid_.size()) + " nodes");
  }

  /// Samples fn at every node.
  static GridFunction sample(const Grid& grid, const std::function<double(std::span<const double>)>& fn) {
    GridFunction out(grid);
    std::vector<double> x(grid.dim());
    for (std::size_t n = 0; n < grid.size(); ++n) {
      for (std::size_t a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(n, a);
      out.values_[n] = fn(x);
    }
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t node) const noexcept { return values_[node]; }
  double& operator[](std::size_t node) noexcept { return values_[node]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const double* data() const noexcept { return values_.data(); }

  bool all_finite() const noexcept {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// max_x |a(x) - b(x)|
inline double sup_distance(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

}  // namespace degenfd
