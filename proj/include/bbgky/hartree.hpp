#pragma once

// Hartree equation i dpsi/dt = -1/2 psi'' + (Phi * |psi|^2) psi on a periodic
// grid by Strang split-step Fourier; Phi = g delta gives the cubic NLS.

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "bbgky/model.hpp"

namespace bbgky {

/// Wavefunction samples on an n-point periodic grid x_j = j L / n.
struct GridState {
  int n_points = 0;
  double length = 0.0;
  Eigen::VectorXcd psi;
  bool normalized = false;

  GridState() = default;
  GridState(double length_, Eigen::VectorXcd values, bool normalize = true)
      : n_points(static_cast<int>(values.size())), length(length_), psi(std::move(values)) {
    validate();
    if (normalize) {
      psi /= std::sqrt(mass());
      normalized = true;
    }
  }

  void validate() const {
    if (n_points < 2 || (n_points & (n_points - 1)) != 0)
      throw PreconditionError("GridState: n_points must be a power of two >= 2, got " + std::to_string(n_points));
    if (!(length > 0.0)) throw PreconditionError("GridState: length must be positive");
    if (psi.size() != n_points) throw DimensionError("GridState: psi has the wrong size");
  }

  double dx() const { return length / n_points; }
  double x(int j) const { return j * dx(); }
  /// sum |psi|^2 dx
  double mass() const { return psi.squaredNorm() * dx(); }

  /// Lattice vector psi_j sqrt(dx) (unit norm when normalized).
  Eigen::VectorXcd lattice_vector() const { return psi * std::sqrt(dx()); }
};

/// The pair interaction: either samples Phi(x_j) of a periodic kernel or a delta of given strength.
struct PotentialKernel {
  bool delta = false;
  double strength = 0.0;        // delta: Phi = strength * delta(x)
  std::vector<double> samples;  // Phi(x_j), j = 0..n-1, x_j = j dx (periodic)

  static PotentialKernel contact(double g) { return {true, g, {}}; }
  static PotentialKernel none() { return {false, 0.0, {}}; }

  /// Samples phi(distance) with the periodic minimum-image distance.
  template <class Phi>
  static PotentialKernel sampled(int n, double length, Phi&& phi) {
    PotentialKernel k;
    const double dx = length / n;
    for (int j = 0; j < n; ++j) k.samples.push_back(phi(std::min(j, n - j) * dx));
    return k;
  }

  bool is_zero() const {
    if (delta) return strength == 0.0;
    for (double v : samples)
      if (v != 0.0) return false;
    return true;
  }
};

/// One-particle lattice model equivalent to the grid: spectral kinetic matrix and
/// Phi_lattice(x_a, x_b) = Phi(x_a - x_b) (delta -> strength / dx on the diagonal).
inline ModelConfig grid_model(int n, double length, const PotentialKernel& kernel) {
  ModelConfig cfg;
  cfg.d = n;
  cfg.boundary = Boundary::periodic;
  cfg.epsilon = 1.0;
  cfg.kinetic = spectral_kinetic(n, length);
  cfg.pair_potential = Matrix::Zero(n * n, n * n);
  const double dx = length / n;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double v = 0.0;
      if (kernel.delta) {
        v = a == b ? kernel.strength / dx : 0.0;
      } else if (!kernel.samples.empty()) {
        v = kernel.samples[static_cast<std::size_t>(((a - b) % n + n) % n)];
      }
      cfg.pair_potential(a * n + b, a * n + b) = v;
    }
  cfg.validate();
  return cfg;
}

struct HartreeOptions {
  double dt = 1e-3;
  std::vector<double> outputs;  // times at which to record psi; empty: only T
};

struct HartreeTrajectory {
  std::vector<double> times;
  std::vector<GridState> states;
  double stability_bound = 0.0;  // pi / (k_max^2/2 + max |V|)
  double max_mass_drift = 0.0;
  double max_energy_drift = 0.0;
  int steps = 0;
};

class HartreeSolver {
 public:
  HartreeSolver(int n, double length, PotentialKernel kernel)
      : n_(n), length_(length), kernel_(std::move(kernel)), k_(grid_wavenumbers(n, length)) {
    if (!kernel_.delta && !kernel_.samples.empty() && static_cast<int>(kernel_.samples.size()) != n)
      throw DimensionError("HartreeSolver: kernel has " + std::to_string(kernel_.samples.size()) + " samples, grid has " +
                           std::to_string(n));
    if (!kernel_.delta && !kernel_.samples.empty()) {
      Eigen::VectorXcd s(n);
      for (int j = 0; j < n; ++j) s(j) = kernel_.samples[static_cast<std::size_t>(j)];
      kernel_hat_ = fft_.fwd(s);
    }
  }

  /// (Phi * |psi|^2)(x_j) by cyclic convolution.
  Eigen::VectorXd potential(const Eigen::VectorXcd& psi) const {
    const double dx = length_ / n_;
    Eigen::VectorXd rho = psi.cwiseAbs2();
    if (kernel_.delta) return kernel_.strength * rho;
    if (kernel_hat_.size() == 0) return Eigen::VectorXd::Zero(n_);
    Eigen::VectorXcd rho_c = rho.cast<cplx>();
    Eigen::VectorXcd rho_hat = fft_.fwd(rho_c);
    Eigen::VectorXcd conv = fft_.inv(Eigen::VectorXcd(rho_hat.cwiseProduct(kernel_hat_)));
    return conv.real() * dx;
  }

  /// 1/2 int |psi'|^2 + 1/2 int (Phi * |psi|^2) |psi|^2, kinetic part spectrally.
  double energy(const Eigen::VectorXcd& psi) const {
    const double dx = length_ / n_;
    Eigen::VectorXcd hat = fft_.fwd(psi);
    double kin = 0.0;
    for (int j = 0; j < n_; ++j) kin += 0.5 * k_[static_cast<std::size_t>(j)] * k_[static_cast<std::size_t>(j)] * std::norm(hat(j));
    kin *= dx / n_;  // Parseval
    const double pot = 0.5 * (potential(psi).array() * psi.cwiseAbs2().array()).sum() * dx;
    return kin + pot;
  }

  double stability_bound(const Eigen::VectorXcd& psi) const {
    double kmax = 0.0;
    for (double k : k_) kmax = std::max(kmax, std::abs(k));
    const double vmax = potential(psi).cwiseAbs().maxCoeff();
    return std::numbers::pi / (0.5 * kmax * kmax + vmax);
  }

  /// One Strang step: half nonlinear phase, full kinetic, half nonlinear phase.
  /// |psi|^2 is invariant under the nonlinear substep, so each half step is exact.
  void step(Eigen::VectorXcd& psi, double dt) const {
    nonlinear(psi, 0.5 * dt);
    Eigen::VectorXcd hat = fft_.fwd(psi);
    for (int j = 0; j < n_; ++j)
      hat(j) *= std::polar(1.0, -0.5 * k_[static_cast<std::size_t>(j)] * k_[static_cast<std::size_t>(j)] * dt);
    psi = fft_.inv(hat);
    nonlinear(psi, 0.5 * dt);
  }

 private:
  void nonlinear(Eigen::VectorXcd& psi, double h) const {
    if (kernel_.is_zero()) return;
    const Eigen::VectorXd v = potential(psi);
    for (int j = 0; j < n_; ++j) psi(j) *= std::polar(1.0, -v(j) * h);
  }

  int n_;
  double length_;
  PotentialKernel kernel_;
  std::vector<double> k_;
  Eigen::VectorXcd kernel_hat_;
  mutable Eigen::FFT<double> fft_;
};

/// Integrates to T with fixed steps (the last step into each output time is
/// shortened if needed). Throws IntegrationError on non-finite values and
/// PreconditionError if dt exceeds the reported stability bound.
inline HartreeTrajectory hartree_split_step(const GridState& psi0, double horizon, const PotentialKernel& kernel,
                                            const HartreeOptions& opt = {}) {
  psi0.validate();
  if (!(opt.dt > 0.0)) throw PreconditionError("hartree_split_step: dt must be positive");
  if (!(horizon >= 0.0)) throw PreconditionError("hartree_split_step: horizon must be >= 0");
  const HartreeSolver solver(psi0.n_points, psi0.length, kernel);

  HartreeTrajectory out;
  out.stability_bound = solver.stability_bound(psi0.psi);
  if (opt.dt > out.stability_bound)
    throw PreconditionError("hartree_split_step: dt = " + std::to_string(opt.dt) + " exceeds stability bound " +
                            std::to_string(out.stability_bound));

  std::vector<double> outputs = opt.outputs;
  if (outputs.empty()) outputs.push_back(horizon);
  const double m0 = psi0.mass();
  const double e0 = solver.energy(psi0.psi);
  Eigen::VectorXcd psi = psi0.psi;
  double t = 0.0;
  for (double target : outputs) {
    if (target < t - 1e-15 || target > horizon + 1e-12)
      throw PreconditionError("hartree_split_step: output times must be ascending within [0, T]");
    const auto steps = static_cast<long>(std::ceil((target - t) / opt.dt - 1e-9));
    const double h = steps > 0 ? (target - t) / static_cast<double>(steps) : 0.0;
    for (long i = 0; i < steps; ++i) {
      solver.step(psi, h);
      ++out.steps;
      if (!psi.allFinite())
        throw IntegrationError("hartree_split_step: non-finite wavefunction at t = " + std::to_string(t + (i + 1) * h) +
                               " (dt = " + std::to_string(h) + ", stability bound " +
                               std::to_string(out.stability_bound) + ")");
    }
    t = target;
    GridState g;
    g.n_points = psi0.n_points;
    g.length = psi0.length;
    g.psi = psi;
    g.normalized = psi0.normalized;
    out.max_mass_drift = std::max(out.max_mass_drift, std::abs(g.mass() - m0));
    out.max_energy_drift = std::max(out.max_energy_drift, std::abs(solver.energy(psi) - e0));
    out.times.push_back(target);
    out.states.push_back(std::move(g));
  }
  return out;
}

/// Plane wave A e^{i k x} with k = 2 pi m / L, normalized to unit mass.
inline GridState plane_wave(int n, double length, int mode) {
  Eigen::VectorXcd v(n);
  for (int j = 0; j < n; ++j) v(j) = std::polar(1.0, 2.0 * std::numbers::pi * mode * j / n);
  return GridState(length, std::move(v), true);
}

}  // namespace bbgky
