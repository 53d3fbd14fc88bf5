#include "hjlab/grid.hpp"

#include <cmath>

#include "hjlab/errors.hpp"

namespace hjlab {

Grid1D Grid1D::uniform(double x_min, double x_max, double dx, bool require_junction) {
  if (!(dx > 0.0)) throw InvalidArgument("grid spacing dx must be positive");
  if (!(x_max > x_min)) throw InvalidArgument("grid requires x_max > x_min");
  const double cells = (x_max - x_min) / dx;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-6) throw InvalidArgument("grid extent must be an integer multiple of dx");
  Grid1D g;
  g.x_min = x_min;
  g.nx = static_cast<std::size_t>(rounded) + 1;
  g.dx = dx;
  g.x_max = g.x(g.nx - 1);
  g.junction_index = g.node_at(0.0);
  if (require_junction && !g.junction_index)
    throw InvalidArgument("junction precondition violated: x = 0 must be a grid node (-x_min/dx integer)");
  return g;
}

std::optional<std::size_t> Grid1D::node_at(double x) const {
  const double r = (x - x_min) / dx;
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-9 || k < 0.0 || k > static_cast<double>(nx - 1)) return std::nullopt;
  return static_cast<std::size_t>(k);
}

}  // namespace hjlab
