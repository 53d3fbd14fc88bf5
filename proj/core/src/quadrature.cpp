#include "hjlab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hjlab/errors.hpp"

namespace hjlab {

namespace {

// Gauss-Legendre abscissae/weights on [-1, 1], positive half
constexpr std::array<double, 4> kGlX = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                        0.9602898564975363};
constexpr std::array<double, 4> kGlW = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                        0.1012285362903763};

}  // namespace

std::vector<SmoothPiece> smooth_pieces(const AssembledHamiltonian& h, double a, double b) {
  std::vector<SmoothPiece> pieces;
  if (!(a < b)) return pieces;
  std::vector<double> cuts;
  h.append_breakpoints(a, b, cuts);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double lo = a;
  const auto emit = [&](double hi) {
    if (hi > lo) pieces.push_back({lo, hi, h.constant_on(lo, hi)});
    lo = hi;
  };
  for (double c : cuts) emit(c);
  emit(b);
  return pieces;
}

std::vector<QuadratureNode> quadrature_nodes(const AssembledHamiltonian& h, double a, double b,
                                             double max_step) {
  if (!(max_step > 0.0)) throw InvalidArgument("quadrature max_step must be positive");
  std::vector<QuadratureNode> nodes;
  for (const SmoothPiece& piece : smooth_pieces(h, a, b)) {
    const double len = piece.hi - piece.lo;
    if (piece.constant) {
      nodes.push_back({0.5 * (piece.lo + piece.hi), len});
      continue;
    }
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / max_step)));
    const double step = len / static_cast<double>(n);
    const double half = 0.5 * step;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = piece.lo + (static_cast<double>(i) + 0.5) * step;
      for (std::size_t j = kGlX.size(); j-- > 0;) nodes.push_back({c - half * kGlX[j], half * kGlW[j]});
      for (std::size_t j = 0; j < kGlX.size(); ++j) nodes.push_back({c + half * kGlX[j], half * kGlW[j]});
    }
  }
  return nodes;
}

}  // namespace hjlab
