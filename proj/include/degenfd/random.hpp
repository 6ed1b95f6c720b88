#pragma once

#include <cstdint>
#include <random>

#include "degenfd/grid.hpp"

namespace degenfd {

using Rng = std::mt19937_64;

/// Uniform [-1, 1] values smoothed once by averaging each node with its
/// existing axis neighbours.
inline GridFunction random_grid_function(const Grid& grid, Rng& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> raw(grid.size());
  for (double& v : raw) v = unit(rng);
  GridFunction out(grid);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    double sum = raw[n];
    int count = 1;
    for (std::size_t a = 0; a < grid.dim(); ++a) {
      const std::size_t k = grid.axis_index(n, a);
      const std::size_t s = grid.stride(a);
      if (k > 0) sum += raw[n - s], ++count;
      if (k + 1 < grid.nodes_per_axis()[a]) sum += raw[n + s], ++count;
    }
    out[n] = sum / count;
  }
  return out;
}

/// Indices of all lattice nodes within one step (in the max norm) of node,
/// excluding node itself.
inline std::vector<std::size_t> box_neighbors(const Grid& grid, std::size_t node) {
  std::vector<std::size_t> out{node};
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    const std::size_t k = grid.axis_index(node, a);
    const std::size_t s = grid.stride(a);
    const std::size_t count = out.size();
    for (std::size_t i = 0; i < count; ++i) {
      if (k > 0) out.push_back(out[i] - s);
      if (k + 1 < grid.nodes_per_axis()[a]) out.push_back(out[i] + s);
    }
  }
  out.erase(out.begin());
  return out;
}

}  // namespace degenfd
