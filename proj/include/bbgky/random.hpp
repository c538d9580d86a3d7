#pragma once

// Seeded generators for random operators used by tests and experiments.

#include <cstdint>
#include <random>

#include "bbgky/operator_core.hpp"

namespace bbgky {

using Rng = std::mt19937_64;

inline Matrix random_complex_matrix(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) m(r, c) = cplx(g(rng), g(rng));
  return m;
}

inline ManyBodyOperator random_operator(Rng& rng, int d, int s) {
  return {d, s, random_complex_matrix(rng, static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(d), s))), false};
}

inline ManyBodyOperator random_hermitian(Rng& rng, int d, int s) {
  Matrix a = random_complex_matrix(rng, static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(d), s)));
  return {d, s, 0.5 * (a + a.adjoint()), true};
}

/// Full-rank density matrix (Ginibre ensemble), trace one.
inline ManyBodyOperator random_density(Rng& rng, int d, int s) {
  Matrix a = random_complex_matrix(rng, static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(d), s)));
  Matrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return {d, s, 0.5 * (rho + rho.adjoint()), true};
}

/// Permutation-symmetric density matrix for s identical particles.
inline ManyBodyOperator random_symmetric_density(Rng& rng, int d, int s) {
  auto rho = symmetrize(random_density(rng, d, s));
  rho.matrix = 0.5 * (rho.matrix + rho.matrix.adjoint());
  rho.matrix /= rho.matrix.trace().real();
  return rho;
}

inline ManyBodyOperator random_symmetric_hermitian(Rng& rng, int d, int s) {
  auto h = symmetrize(random_hermitian(rng, d, s));
  h.matrix = 0.5 * (h.matrix + h.matrix.adjoint());
  h.hermitian = true;
  return h;
}

/// Rank-one projector onto a random unit vector.
inline ManyBodyOperator random_pure_state(Rng& rng, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(d);
  for (int i = 0; i < d; ++i) v(i) = cplx(g(rng), g(rng));
  v.normalize();
  return {d, 1, v * v.adjoint(), true};
}

}  // namespace bbgky
