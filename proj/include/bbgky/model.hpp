#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bbgky/operator_core.hpp"

namespace bbgky {

enum class Boundary { periodic, open };

/// One-particle lattice model: H_s = sum_i K(i) + epsilon sum_{i<j} Phi(i,j).
struct ModelConfig {
  int d = 2;
  Matrix kinetic;         // d x d, Hermitian
  Matrix pair_potential;  // d^2 x d^2, real symmetric, swap invariant
  double epsilon = 1.0;
  Boundary boundary = Boundary::open;
  std::size_t dim_cap = kDefaultDimCap;

  void validate() const {
    if (d < 1) throw PreconditionError("ModelConfig: d must be positive");
    if (kinetic.rows() != d || kinetic.cols() != d) throw DimensionError("ModelConfig: kinetic must be d x d");
    const double kscale = std::max(1.0, max_abs(kinetic));
    if (hermitian_defect(kinetic) > 1e-12 * kscale) throw PreconditionError("ModelConfig: kinetic is not Hermitian");
    if (pair_potential.rows() != d * d || pair_potential.cols() != d * d)
      throw DimensionError("ModelConfig: pair_potential must be d^2 x d^2");
    if (!pair_potential.allFinite()) throw PreconditionError("ModelConfig: pair_potential is unbounded");
    if (max_abs(pair_potential.imag()) > kStructuralTol)
      throw PreconditionError("ModelConfig: pair_potential must be real");
    if (hermitian_defect(pair_potential) > kStructuralTol)
      throw PreconditionError("ModelConfig: pair_potential must be symmetric");
    const int swap[2] = {2, 1};
    if (max_abs(permute_particles(pair_potential, d, swap) - pair_potential) > kStructuralTol)
      throw PreconditionError("ModelConfig: pair_potential is not invariant under particle swap");
    if (!(epsilon >= 0.0)) throw PreconditionError("ModelConfig: epsilon must be >= 0");
  }

  /// Throws if a d^s dimensional operator would exceed the cap.
  void check_cap(int s) const {
    if (ipow(static_cast<std::size_t>(d), s) > dim_cap)
      throw CapExceeded("d^s = " + std::to_string(d) + "^" + std::to_string(s) + " exceeds dimension cap " +
                        std::to_string(dim_cap));
  }

  ModelConfig with_epsilon(double eps) const {
    ModelConfig c = *this;
    c.epsilon = eps;
    return c;
  }
};

inline int lattice_distance(int a, int b, int d, Boundary boundary) {
  const int diff = std::abs(a - b);
  return boundary == Boundary::periodic ? std::min(diff, d - diff) : diff;
}

/// -1/2 times the graph Laplacian of a chain (unit spacing). A two-site ring has a single bond.
inline Matrix lattice_kinetic(int d, Boundary boundary) {
  Matrix k = Matrix::Zero(d, d);
  auto bond = [&](int a, int b) {
    k(a, a) += 0.5;
    k(b, b) += 0.5;
    k(a, b) -= 0.5;
    k(b, a) -= 0.5;
  };
  for (int a = 0; a + 1 < d; ++a) bond(a, a + 1);
  if (boundary == Boundary::periodic && d > 2) bond(d - 1, 0);
  return k;
}

/// Fourier wavenumbers of an n-point periodic grid of the given length (FFT ordering).
inline std::vector<double> grid_wavenumbers(int n, double length) {
  std::vector<double> k(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const int m = j < (n + 1) / 2 ? j : j - n;
    k[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * m / length;
  }
  // the Nyquist mode of an even grid is taken as |k| so that k^2 is symmetric
  if (n % 2 == 0) k[static_cast<std::size_t>(n / 2)] = std::numbers::pi * n / length;
  return k;
}

/// Spectral -1/2 d^2/dx^2 on an n-point periodic grid, as a dense Hermitian matrix
/// acting on grid values.
inline Matrix spectral_kinetic(int n, double length) {
  const auto k = grid_wavenumbers(n, length);
  Matrix out = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      cplx acc = 0.0;
      for (int j = 0; j < n; ++j) {
        const double kj = k[static_cast<std::size_t>(j)];
        acc += 0.5 * kj * kj * std::polar(1.0, kj * length * (a - b) / n);
      }
      out(a, b) = acc / static_cast<double>(n);
    }
  return 0.5 * (out + out.adjoint());
}

/// Diagonal pair potential with entries phi(dist(x_a, x_b)).
inline Matrix pair_potential_from_distance(int d, Boundary boundary, const std::function<double(int)>& phi) {
  Matrix out = Matrix::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) out(a * d + b, a * d + b) = phi(lattice_distance(a, b, d, boundary));
  return out;
}

/// Lattice model with phi given per distance (missing distances are zero).
inline ModelConfig lattice_model(int d, std::span<const double> phi_by_distance, double epsilon,
                                 Boundary boundary = Boundary::open) {
  ModelConfig cfg;
  cfg.d = d;
  cfg.boundary = boundary;
  cfg.epsilon = epsilon;
  cfg.kinetic = lattice_kinetic(d, boundary);
  std::vector<double> phi(phi_by_distance.begin(), phi_by_distance.end());
  cfg.pair_potential = pair_potential_from_distance(d, boundary, [phi](int r) {
    return r < static_cast<int>(phi.size()) ? phi[static_cast<std::size_t>(r)] : 0.0;
  });
  cfg.validate();
  return cfg;
}

/// Default two-level test model: single hopping bond, contact plus neighbour repulsion.
inline ModelConfig default_two_site_model(double epsilon) {
  const double phi[] = {1.0, 0.4};
  return lattice_model(2, phi, epsilon, Boundary::open);
}

}  // namespace bbgky
