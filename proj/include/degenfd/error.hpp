#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace degenfd {

/// Bad user input: malformed grids, invalid parameters, unreadable configs.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Grid construction failure on a specific axis.
class GridError : public InputError {
 public:
  GridError(const std::string& what, std::size_t axis)
      : InputError(what + " (axis " + std::to_string(axis) + ")"), axis_(axis) {}
  std::size_t axis() const noexcept { return axis_; }

 private:
  std::size_t axis_;
};

/// A stencil was requested at a node that cannot support it.
class StencilError : public InputError {
 public:
  StencilError(const std::string& what, std::size_t node)
      : InputError(what + " (node " + std::to_string(node) + ")"), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// Numerical breakdown: non-finite iterates, divergence of the Euler map.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what,
                          std::optional<std::size_t> node = std::nullopt)
      : std::runtime_error(what), node_(node) {}
  std::optional<std::size_t> node() const noexcept { return node_; }

 private:
  std::optional<std::size_t> node_;
};

}  // namespace degenfd
