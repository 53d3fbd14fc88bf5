#pragma once

#include <random>

#include "hjlab/experiments.hpp"
#include "hjlab/hamiltonian.hpp"

namespace hjlab::test {

inline PieceSpec flat_piece(CoreHamiltonian core) {
  PieceSpec p;
  p.core = std::move(core);
  p.medium.marks = MarkDistribution::deterministic();
  return p;
}

/// psi = 1 everywhere.
inline EnvironmentSpec flat_env(CoreHamiltonian core, JunctionMode mode = JunctionMode::none) {
  EnvironmentSpec e;
  e.mode = mode;
  e.left = flat_piece(std::move(core));
  return e;
}

inline AssembledHamiltonian abs_h() { return flat_env(CoreHamiltonian::absolute()).build(1); }
inline AssembledHamiltonian traffic_flat() { return flat_env(CoreHamiltonian::traffic_default()).build(1); }
inline AssembledHamiltonian traffic_random(std::uint64_t seed) { return stationary_environment().build(seed); }

}  // namespace hjlab::test
