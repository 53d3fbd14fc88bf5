#pragma once

#include <vector>

#include "hjlab/hamiltonian.hpp"

namespace hjlab {

/// Interval between consecutive breakpoints of y -> H(., y, omega).
struct SmoothPiece {
  double lo;
  double hi;
  bool constant;
};

struct QuadratureNode {
  double s;
  double w;
};

/// Splits [a, b] at the Hamiltonian's breakpoints.
std::vector<SmoothPiece> smooth_pieces(const AssembledHamiltonian& h, double a, double b);

/// Composite 8-point Gauss-Legendre on each smooth piece with sub-steps of at
/// most max_step; a single midpoint node on pieces where H does not depend on y.
/// Nodes come out in ascending order and weights sum to b - a.
std::vector<QuadratureNode> quadrature_nodes(const AssembledHamiltonian& h, double a, double b,
                                             double max_step = 0.05);

}  // namespace hjlab
