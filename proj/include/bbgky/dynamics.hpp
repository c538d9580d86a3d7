#pragma once

// Hamiltonians H_s, the unitary groups they generate, and their generators.
//
// Conventions (hbar = m = 1):
//   G_s(t)  g = e^{itH} g e^{-itH}   Heisenberg picture, observables
//   G_s(-t) f = e^{-itH} f e^{itH}   von Neumann picture, states
//   N g = i(Hg - gH),  N_int(i,j) g = -i[g, Phi(i,j)]

#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <vector>

#include "bbgky/model.hpp"
#include "bbgky/quadrature.hpp"

namespace bbgky {

inline std::vector<int> label_range(int first, int last) {
  std::vector<int> out;
  for (int l = first; l <= last; ++l) out.push_back(l);
  return out;
}

/// H_s = sum_i K(i) + epsilon sum_{i<j} Phi(i,j); H_0 = 0.
inline ManyBodyOperator build_hamiltonian(int s, const ModelConfig& cfg) {
  if (s < 0) throw DimensionError("build_hamiltonian: s must be >= 0");
  cfg.check_cap(s);
  if (s == 0) return ManyBodyOperator::scalar(cfg.d, 0.0);
  const auto n = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(cfg.d), s));
  Matrix h = Matrix::Zero(n, n);
  for (int i = 1; i <= s; ++i) {
    const int l[] = {i};
    h += embed_matrix(cfg.kinetic, cfg.d, l, s);
  }
  if (cfg.epsilon != 0.0)
    for (int i = 1; i <= s; ++i)
      for (int j = i + 1; j <= s; ++j) {
        const int l[] = {i, j};
        h += cfg.epsilon * embed_matrix(cfg.pair_potential, cfg.d, l, s);
      }
  return {cfg.d, s, 0.5 * (h + h.adjoint()), true};
}

/// Sum of Phi over the given label pairs (i < j within `labels`), unscaled.
inline Matrix pair_sum(const ModelConfig& cfg, int s, std::span<const std::pair<int, int>> pairs) {
  const auto n = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(cfg.d), s));
  Matrix out = Matrix::Zero(n, n);
  for (auto [i, j] : pairs) {
    const int l[] = {i, j};
    out += embed_matrix(cfg.pair_potential, cfg.d, l, s);
  }
  return out;
}

/// Spectral decomposition of a Hermitian generator, reused for every t.
class Propagator {
 public:
  Propagator() = default;
  Propagator(const ManyBodyOperator& h, double epsilon) : d_(h.d), s_(h.s), built_for_epsilon_(epsilon) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h.matrix + h.matrix.adjoint()));
    if (es.info() != Eigen::Success) throw Error("Propagator: eigendecomposition failed");
    eigenvalues_ = es.eigenvalues();
    eigenvectors_ = es.eigenvectors();
  }

  int s() const { return s_; }
  int d() const { return d_; }
  double built_for_epsilon() const { return built_for_epsilon_; }
  const RealVector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }

  /// e^{-iHt}
  Matrix unitary(double t) const {
    Eigen::VectorXcd phase(eigenvalues_.size());
    for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) phase(k) = std::polar(1.0, -eigenvalues_(k) * t);
    return eigenvectors_ * phase.asDiagonal() * eigenvectors_.adjoint();
  }

  Matrix reconstruct() const { return eigenvectors_ * eigenvalues_.cast<cplx>().asDiagonal() * eigenvectors_.adjoint(); }

  /// G_s(t) g = e^{itH} g e^{-itH}
  ManyBodyOperator evolve_observable(const ManyBodyOperator& g, double t) const {
    check(g);
    const Matrix u = unitary(t);
    return {g.d, g.s, u.adjoint() * g.matrix * u, g.hermitian};
  }

  /// G_s(-t) f = e^{-itH} f e^{itH}
  ManyBodyOperator evolve_state(const ManyBodyOperator& f, double t) const {
    check(f);
    const Matrix u = unitary(t);
    return {f.d, f.s, u * f.matrix * u.adjoint(), f.hermitian};
  }

 private:
  void check(const ManyBodyOperator& x) const {
    if (x.s != s_ || x.d != d_)
      throw DimensionError("Propagator: operand has s=" + std::to_string(x.s) + ", propagator built for s=" +
                           std::to_string(s_));
  }

  int d_ = 1;
  int s_ = 0;
  double built_for_epsilon_ = 0.0;
  RealVector eigenvalues_;
  Matrix eigenvectors_;
};

/// Which group a block of particles evolves under.
enum class GroupKind {
  heisenberg,        // G_k(t):  conjugation by e^{itH_k}
  von_neumann,       // G_k(-t): conjugation by e^{-itH_k}
  scattering,        // G_k(-t) prod_i G_1(t,i)
  free_heisenberg,   // prod_i G_1(t,i)
  free_von_neumann,  // prod_i G_1(-t,i)
};

/// Model plus lazily built propagators for H_1, H_2, ...
///
/// Thread-safe: decompositions are created once under a lock and never mutated.
class Dynamics {
 public:
  explicit Dynamics(ModelConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    one_ = Propagator(build_hamiltonian(1, cfg_), cfg_.epsilon);
  }

  const ModelConfig& model() const { return cfg_; }
  int d() const { return cfg_.d; }
  double epsilon() const { return cfg_.epsilon; }

  const Propagator& propagator(int s) const {
    if (s < 1) throw DimensionError("Dynamics::propagator: s must be >= 1");
    if (s == 1) return one_;
    std::lock_guard lock(mutex_);
    auto it = cache_.find(s);
    if (it == cache_.end())
      it = cache_.emplace(s, std::make_shared<const Propagator>(build_hamiltonian(s, cfg_), cfg_.epsilon)).first;
    return *it->second;
  }

  /// e^{-iH_s t}
  Matrix unitary(int s, double t) const {
    if (s == 0) return Matrix::Identity(1, 1);
    return propagator(s).unitary(t);
  }

  /// e^{-i(K(1)+...+K(s))t}
  Matrix free_unitary(int s, double t) const {
    const Matrix u1 = one_.unitary(t);
    Matrix u = Matrix::Identity(1, 1);
    for (int i = 0; i < s; ++i) u = kron(u, u1);
    return u;
  }

  /// W with block map X -> W X W^dagger for `kind` at time t on k particles.
  Matrix conjugator(GroupKind kind, int k, double t) const {
    cfg_.check_cap(k);
    switch (kind) {
      case GroupKind::heisenberg: return unitary(k, -t);
      case GroupKind::von_neumann: return unitary(k, t);
      case GroupKind::scattering:
        if (k <= 1) return Matrix::Identity(cfg_.d, cfg_.d);
        return unitary(k, t) * free_unitary(k, -t);
      case GroupKind::free_heisenberg: return free_unitary(k, -t);
      case GroupKind::free_von_neumann: return free_unitary(k, t);
    }
    throw Error("unknown GroupKind");
  }

  /// Sum_{i<j<=s} Phi(i,j), cached.
  const Matrix& interaction(int s) const {
    std::lock_guard lock(mutex_);
    auto it = interaction_.find(s);
    if (it == interaction_.end()) {
      std::vector<std::pair<int, int>> pairs;
      for (int i = 1; i <= s; ++i)
        for (int j = i + 1; j <= s; ++j) pairs.emplace_back(i, j);
      it = interaction_.emplace(s, std::make_shared<const Matrix>(pair_sum(cfg_, s, pairs))).first;
    }
    return *it->second;
  }

  /// Sum_{i<=s} Phi(i, s+1) on s+1 particles, cached.
  const Matrix& coupling(int s) const {
    std::lock_guard lock(mutex_);
    auto it = coupling_.find(s);
    if (it == coupling_.end()) {
      std::vector<std::pair<int, int>> pairs;
      for (int i = 1; i <= s; ++i) pairs.emplace_back(i, s + 1);
      it = coupling_.emplace(s, std::make_shared<const Matrix>(pair_sum(cfg_, s + 1, pairs))).first;
    }
    return *it->second;
  }

 private:
  ModelConfig cfg_;
  Propagator one_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::shared_ptr<const Propagator>> cache_;
  mutable std::map<int, std::shared_ptr<const Matrix>> interaction_;
  mutable std::map<int, std::shared_ptr<const Matrix>> coupling_;
};

inline ManyBodyOperator evolve_observable(const ManyBodyOperator& g, double t, const Propagator& prop) {
  return prop.evolve_observable(g, t);
}

inline ManyBodyOperator evolve_state(const ManyBodyOperator& f, double t, const Propagator& prop) {
  return prop.evolve_state(f, t);
}

/// Heisenberg generator N g = i(Hg - gH).
inline ManyBodyOperator generator_heisenberg(const ManyBodyOperator& g, const ManyBodyOperator& h) {
  require_same_shape(g, h, "generator_heisenberg");
  return {g.d, g.s, cplx(0, 1) * (h.matrix * g.matrix - g.matrix * h.matrix), g.hermitian};
}

/// von Neumann generator -N f = -i(Hf - fH).
inline ManyBodyOperator generator_vonneumann(const ManyBodyOperator& f, const ManyBodyOperator& h) {
  require_same_shape(f, h, "generator_vonneumann");
  return {f.d, f.s, cplx(0, -1) * (h.matrix * f.matrix - f.matrix * h.matrix), f.hermitian};
}

/// N_0(j) g = -i[g, K(j)].
inline ManyBodyOperator free_generator(const ManyBodyOperator& g, int j, const ModelConfig& cfg) {
  const int l[] = {j};
  const Matrix k = embed_matrix(cfg.kinetic, cfg.d, l, g.s);
  return {g.d, g.s, cplx(0, -1) * (g.matrix * k - k * g.matrix), g.hermitian};
}

/// N_int(i,j) g = -i[g, Phi(i,j)].
inline ManyBodyOperator interaction_generator(const ManyBodyOperator& g, int i, int j, const ModelConfig& cfg) {
  const int l[] = {i, j};
  const Matrix phi = embed_matrix(cfg.pair_potential, cfg.d, l, g.s);
  return {g.d, g.s, cplx(0, -1) * (g.matrix * phi - phi * g.matrix), g.hermitian};
}

/// -i[A, X] as a raw matrix helper.
inline Matrix minus_i_commutator(const Matrix& a, const Matrix& x) { return cplx(0, -1) * (a * x - x * a); }

/// Trace-norm defect of the Duhamel identity
///   (G_s(-t) - prod_l G_1(-t,l)) f
///     = eps int_0^t prod_l G_1(-t+tau,l) (-sum_{i<j} N_int(i,j)) G_s(-tau) f dtau
/// with the integral by adaptive composite Gauss-Legendre.
inline double duhamel_residual(int s, double t, const ManyBodyOperator& f, const Dynamics& dyn,
                               const AdaptiveOptions& quad = {}) {
  if (f.s != s || f.d != dyn.d()) throw DimensionError("duhamel_residual: operand does not match s");
  // both sides vanish identically for s = 0, t = 0 or eps = 0
  if (s == 0 || t == 0.0 || dyn.epsilon() == 0.0) return 0.0;
  const Matrix u = dyn.unitary(s, t);
  const Matrix u0 = dyn.free_unitary(s, t);
  const Matrix lhs = u * f.matrix * u.adjoint() - u0 * f.matrix * u0.adjoint();
  const Matrix& phi = dyn.interaction(s);
  const auto& prop = dyn.propagator(s);
  auto integrand = [&](double tau) -> Matrix {
    const Matrix ut = prop.unitary(tau);
    const Matrix inner = minus_i_commutator(phi, ut * f.matrix * ut.adjoint());
    const Matrix w = dyn.free_unitary(s, t - tau);
    return w * inner * w.adjoint();
  };
  const Eigen::Index n = f.dim();
  auto eval = [&](int panels) { return integrate_composite<Matrix>(integrand, 0.0, t, panels, Matrix::Zero(n, n)); };
  auto dist = [](const Matrix& a, const Matrix& b) { return trace_norm(a - b); };
  const auto integral = refine_until_converged<Matrix>(eval, dist, quad);
  return trace_norm(lhs - dyn.epsilon() * integral.value);
}

}  // namespace bbgky
