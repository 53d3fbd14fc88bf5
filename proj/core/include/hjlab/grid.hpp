#pragma once

#include <cstddef>
#include <optional>

namespace hjlab {

/// Uniform 1D grid; x = 0 is a node whenever junction_index is set.
struct Grid1D {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t nx = 0;
  double dx = 0.0;
  std::optional<std::size_t> junction_index;

  /// Builds the grid with spacing dx; (x_max - x_min)/dx must be an integer.
  /// With require_junction, -x_min/dx must be an integer too.
  static Grid1D uniform(double x_min, double x_max, double dx, bool require_junction = false);

  double x(std::size_t i) const { return x_min + dx * static_cast<double>(i); }
  /// Index of the node at position x, if any (to 1e-9 dx).
  std::optional<std::size_t> node_at(double x) const;
};

}  // namespace hjlab
