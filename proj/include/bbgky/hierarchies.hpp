#pragma once

// BBGKY hierarchy for marginal states and its dual for marginal observables:
// cumulant-series solutions, the mean-value pairing, correlation operators,
// cluster expansions, and ODE integrators used as independent oracles.
//
// Marginals of an N-particle state D_N are F_s = N!/(N-s)! Tr_{s+1..N} D_N, so
// Tr F_1 = N and the traced von Neumann flow reads
//   dF_s/dt = -N_s F_s + eps sum_{i<=s} Tr_{s+1} (-N_int(i,s+1)) F_{s+1}.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "bbgky/cumulants.hpp"
#include "bbgky/parallel.hpp"
#include "bbgky/rk4.hpp"

namespace bbgky {

enum class MarginalConvention { grand_canonical, finite_sector };

/// F_0, F_1, ..., F_{s_max}. F_0 is a scalar.
struct MarginalSequence {
  std::vector<ManyBodyOperator> F;
  MarginalConvention convention = MarginalConvention::grand_canonical;
  int particles = 0;  // N for a finite sector

  int s_max() const { return static_cast<int>(F.size()) - 1; }
  int d() const { return F.empty() ? 1 : F.front().d; }

  /// F_s, or nullopt-equivalent zero where the sequence is known to vanish.
  std::optional<ManyBodyOperator> get(int s) const {
    if (s >= 0 && s <= s_max()) return F[static_cast<std::size_t>(s)];
    if (convention == MarginalConvention::finite_sector && s > particles) return ManyBodyOperator::zero(d(), s);
    return std::nullopt;
  }
};

/// Sequence of s-particle operators with a norm weight (gamma for observables,
/// alpha for states).
struct OperatorSequence {
  std::vector<ManyBodyOperator> items;
  double weight = 0.5;

  int size() const { return static_cast<int>(items.size()); }

  /// max_n gamma^n / n! |g_n|_op
  double gamma_norm() const {
    double best = 0.0, fact = 1.0;
    for (std::size_t n = 0; n < items.size(); ++n) {
      if (n > 0) fact *= static_cast<double>(n);
      best = std::max(best, std::pow(weight, static_cast<double>(n)) / fact * op_norm(items[n]));
    }
    return best;
  }

  /// sum_n alpha^n |f_n|_tr
  double alpha_norm() const {
    double sum = 0.0;
    for (std::size_t n = 0; n < items.size(); ++n) sum += std::pow(weight, static_cast<double>(n)) * trace_norm(items[n]);
    return sum;
  }
};

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Marginals of a finite-sector density D_N up to s_max.
inline MarginalSequence marginals_from_sector(const ManyBodyOperator& density, int s_max) {
  const int n = density.s;
  if (n < 1) throw DimensionError("marginals_from_sector: need at least one particle");
  if (hermitian_defect(density.matrix) > kStructuralTol)
    throw PreconditionError("marginals_from_sector: density is not Hermitian");
  if (std::abs(density.trace() - 1.0) > 1e-9) throw PreconditionError("marginals_from_sector: trace must be 1");
  if (min_eigenvalue(density.matrix) < -1e-10) throw PreconditionError("marginals_from_sector: density not positive");
  if (!is_permutation_symmetric(density)) throw PreconditionError("marginals_from_sector: density not symmetric");

  MarginalSequence out;
  out.convention = MarginalConvention::finite_sector;
  out.particles = n;
  const int top = std::min(s_max, n);
  for (int s = 0; s <= top; ++s) {
    auto f = trace_out_tail(density, s);
    f.matrix *= factorial(n) / factorial(n - s);
    f.matrix = 0.5 * (f.matrix + f.matrix.adjoint());
    f.hermitian = true;
    out.F.push_back(std::move(f));
  }
  for (int s = top + 1; s <= s_max; ++s) out.F.push_back(ManyBodyOperator::zero(density.d, s));
  return out;
}

/// Chaotic data F_s = f1^{(x)s} for s = 0..s_max (grand canonical).
inline MarginalSequence chaotic_marginals(const ManyBodyOperator& f1, int s_max) {
  MarginalSequence out;
  for (int s = 0; s <= s_max; ++s) out.F.push_back(tensor_power(f1, s));
  return out;
}

/// Partial sum of a series plus the trace norm of its last included term.
struct SeriesResult {
  ManyBodyOperator value;
  double last_term_norm = 0.0;
  int terms = 0;
};

namespace detail {

inline std::vector<PartitionElement> cluster_plus_singles(int s, int extra) {
  std::vector<PartitionElement> elements;
  elements.push_back(PartitionElement::make_cluster(label_range(1, s)));
  for (int l = s + 1; l <= s + extra; ++l) elements.push_back(PartitionElement::single(l));
  return elements;
}

inline ManyBodyOperator hermitize(ManyBodyOperator x) {
  x.matrix = 0.5 * (x.matrix + x.matrix.adjoint());
  x.hermitian = true;
  return x;
}

}  // namespace detail

/// F_s(t) = sum_{n=0}^{n_max} 1/n! Tr_{s+1..s+n} A_{1+n}(-t, {1..s}, s+1..s+n) F_{s+n}(0).
///
/// For a finite sector the series terminates at n = N - s and n_max must reach it.
inline SeriesResult bbgky_series(double t, int s, const MarginalSequence& f0, int n_max, const Dynamics& dyn) {
  if (s < 1) throw DimensionError("bbgky_series: s must be >= 1");
  if (n_max < 0) throw PreconditionError("bbgky_series: n_max must be >= 0");
  if (f0.convention == MarginalConvention::finite_sector) {
    if (n_max < f0.particles - s)
      throw PreconditionError("bbgky_series: finite sector of N=" + std::to_string(f0.particles) +
                              " needs n_max >= " + std::to_string(f0.particles - s) + " for exactness");
    n_max = std::min(n_max, std::max(0, f0.particles - s));
  }
  const BlockGroup group(dyn, GroupKind::von_neumann, t);
  auto term = [&](std::size_t idx) -> Matrix {
    const int n = static_cast<int>(idx);
    const auto fsn = f0.get(s + n);
    if (!fsn) throw DimensionError("bbgky_series: initial data lacks F_" + std::to_string(s + n));
    if (fsn->d != dyn.d()) throw DimensionError("bbgky_series: initial data has wrong one-particle dimension");
    const auto elements = detail::cluster_plus_singles(s, n);
    const auto c = cumulant(group, elements, *fsn);
    return trace_out_tail(c, s).matrix / factorial(n);
  };
  const auto terms = parallel_map(static_cast<std::size_t>(n_max + 1), term);
  PairwiseSum<Matrix> sum;
  for (const auto& m : terms) sum.add(m);
  const auto dim = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(dyn.d()), s));
  SeriesResult out{detail::hermitize({dyn.d(), s, sum.result(Matrix::Zero(dim, dim))}), trace_norm(terms.back()),
                   n_max + 1};
  return out;
}

/// C_s X = Tr_{s+1} (-i [sum_{i<=s} Phi(i,s+1), X]) for an (s+1)-particle X.
inline Matrix collision_term(const Dynamics& dyn, int s, const Matrix& x) {
  const ManyBodyOperator c(dyn.d(), s + 1, minus_i_commutator(dyn.coupling(s), x));
  return trace_out_tail(c, s).matrix;
}

/// Perturbation (iteration) series in eps up to `order`, with nested time
/// integrals by composite Gauss-Legendre refined jointly at every level:
///   term_0^{(k)}(tau) = G_k(-tau) F_k(0)
///   term_n^{(s)}(t)   = int_0^t G_s(-(t-t1)) C_s term_{n-1}^{(s+1)}(t1) dt1
///   F_s(t) = sum_n eps^n term_n^{(s)}(t).
/// `free` swaps every G_k for the free group and drops eps (Vlasov hierarchy form).
inline SeriesResult iteration_series(double t, int s, const MarginalSequence& f0, int order, const Dynamics& dyn,
                                     bool free = false, const AdaptiveOptions& quad = {}) {
  if (s < 1) throw DimensionError("iteration_series: s must be >= 1");
  if (order < 0 || order > 4) throw PreconditionError("iteration_series: order must be in 0..4");
  const int d = dyn.d();
  const double coupling = free ? 1.0 : dyn.epsilon();
  auto conjugate = [&](int k, double tau, const Matrix& x) -> Matrix {
    const Matrix w = free ? dyn.free_unitary(k, tau) : dyn.unitary(k, tau);
    return w * x * w.adjoint();
  };
  auto initial = [&](int k) -> Matrix {
    const auto fk = f0.get(k);
    if (!fk) throw DimensionError("iteration_series: initial data lacks F_" + std::to_string(k));
    return fk->matrix;
  };

  // term_n^{(k)}(tau) at a given panel count
  std::function<Matrix(int, int, double, int)> term = [&](int n, int k, double tau, int panels) -> Matrix {
    if (n == 0) return conjugate(k, tau, initial(k));
    const auto dim = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(d), k));
    if (tau == 0.0) return Matrix::Zero(dim, dim);
    if (f0.convention == MarginalConvention::finite_sector && k + n > f0.particles) return Matrix::Zero(dim, dim);
    return integrate_composite<Matrix>(
        [&](double t1) { return conjugate(k, tau - t1, collision_term(dyn, k, term(n - 1, k + 1, t1, panels))); }, 0.0,
        tau, panels, Matrix::Zero(dim, dim));
  };

  const auto dim = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(d), s));
  double last = 0.0;
  Matrix total = Matrix::Zero(dim, dim);
  for (int n = 0; n <= order; ++n) {
    Matrix tn;
    if (n == 0) {
      tn = term(0, s, t, 1);
    } else {
      auto eval = [&](int panels) { return term(n, s, t, panels); };
      auto dist = [](const Matrix& a, const Matrix& b) { return trace_norm(a - b); };
      tn = refine_until_converged<Matrix>(eval, dist, quad).value;
    }
    tn *= std::pow(coupling, n);
    last = trace_norm(tn);
    total += tn;
  }
  return {detail::hermitize({d, s, total}), last, order + 1};
}

/// The iteration series for the BBGKY hierarchy.
inline SeriesResult bbgky_iteration(double t, int s, const MarginalSequence& f0, int order, const Dynamics& dyn,
                                    const AdaptiveOptions& quad = {}) {
  return iteration_series(t, s, f0, order, dyn, false, quad);
}

/// Calls visit(labels) for every ordered injection of k labels from 1..s.
template <class Visit>
void for_each_injection(int s, int k, Visit&& visit) {
  std::vector<int> chosen;
  std::vector<bool> used(static_cast<std::size_t>(s + 1), false);
  std::function<void()> rec = [&] {
    if (static_cast<int>(chosen.size()) == k) {
      visit(chosen);
      return;
    }
    for (int l = 1; l <= s; ++l) {
      if (used[static_cast<std::size_t>(l)]) continue;
      used[static_cast<std::size_t>(l)] = true;
      chosen.push_back(l);
      rec();
      chosen.pop_back();
      used[static_cast<std::size_t>(l)] = false;
    }
  };
  rec();
}

/// Dual series for marginal observables (finite sum, exact):
///   G_s(t) = sum_{n=0}^{s} 1/(s-n)! sum_{j_1 != ... != j_{s-n}}
///            A_{1+n}(t, {j}_1, Y \ {j}) G_{s-n}(0, j_1..j_{s-n}).
/// The n = s term carries G_0 and vanishes for s >= 1.
inline ManyBodyOperator dual_series(double t, int s, const OperatorSequence& g0, const Dynamics& dyn) {
  if (s < 0) throw DimensionError("dual_series: s must be >= 0");
  if (s >= g0.size()) throw PreconditionError("dual_series: initial data lacks G_" + std::to_string(s));
  for (int k = 1; k <= s; ++k)
    if (g0.items[static_cast<std::size_t>(k)].s != k || g0.items[static_cast<std::size_t>(k)].d != dyn.d())
      throw DimensionError("dual_series: G_" + std::to_string(k) + " has the wrong shape");
  if (s == 0) return g0.items[0];
  const BlockGroup group(dyn, GroupKind::heisenberg, t);
  auto term = [&](std::size_t idx) -> Matrix {
    const int n = static_cast<int>(idx);
    const int k = s - n;
    const auto dim = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(dyn.d()), s));
    PairwiseSum<Matrix> sum;
    for_each_injection(s, k, [&](const std::vector<int>& js) {
      std::vector<PartitionElement> elements{PartitionElement::make_cluster(js)};
      for (int l = 1; l <= s; ++l)
        if (std::find(js.begin(), js.end(), l) == js.end()) elements.push_back(PartitionElement::single(l));
      const auto placed = tensor_embed(g0.items[static_cast<std::size_t>(k)], js, s);
      sum.add(cumulant(group, elements, placed).matrix);
    });
    return sum.result(Matrix::Zero(dim, dim)) / factorial(k);
  };
  const auto terms = parallel_map(static_cast<std::size_t>(s), term);
  PairwiseSum<Matrix> total;
  for (const auto& m : terms) total.add(m);
  const auto dim = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(dyn.d()), s));
  return {dyn.d(), s, total.result(Matrix::Zero(dim, dim)), g0.items[static_cast<std::size_t>(s)].hermitian};
}

/// Dual solution G(t) = (G_0, G_1(t), ..., G_{s_max}(t)).
inline OperatorSequence dual_solution(double t, const OperatorSequence& g0, const Dynamics& dyn) {
  OperatorSequence out;
  out.weight = g0.weight;
  for (int s = 0; s < g0.size(); ++s) out.items.push_back(dual_series(t, s, g0, dyn));
  return out;
}

/// sum_s 1/s! Tr G_s F_s over the common range (complex).
inline cplx pairing_complex(const OperatorSequence& g, const MarginalSequence& f) {
  PairwiseSum<cplx> sum;
  const int top = std::min(g.size() - 1, f.s_max());
  for (int s = 0; s <= top; ++s) {
    const auto& gs = g.items[static_cast<std::size_t>(s)];
    const auto& fs = f.F[static_cast<std::size_t>(s)];
    if (gs.s != fs.s || gs.d != fs.d) throw DimensionError("pairing: component " + std::to_string(s) + " mismatch");
    sum.add((gs.matrix.transpose().cwiseProduct(fs.matrix)).sum() / factorial(s));
  }
  return sum.result(cplx(0.0));
}

/// Real part of the mean-value pairing.
inline double pairing(const OperatorSequence& g, const MarginalSequence& f) { return pairing_complex(g, f).real(); }

/// G_s(t) = sum_{n=0}^{n_max} 1/n! Tr_{s+1..s+n} A_{s+n}(-t, 1..s+n) prod_i F_1(0,i).
inline SeriesResult correlation_series(double t, int s, const ManyBodyOperator& f1, int n_max, const Dynamics& dyn) {
  if (s < 1) throw DimensionError("correlation_series: s must be >= 1");
  if (f1.s != 1 || f1.d != dyn.d()) throw DimensionError("correlation_series: F_1 must be one-particle");
  const BlockGroup group(dyn, GroupKind::von_neumann, t);
  auto term = [&](std::size_t idx) -> Matrix {
    const int n = static_cast<int>(idx);
    const auto c = cumulant(group, singles(1, s + n), tensor_power(f1, s + n));
    return trace_out_tail(c, s).matrix / factorial(n);
  };
  const auto terms = parallel_map(static_cast<std::size_t>(n_max + 1), term);
  PairwiseSum<Matrix> sum;
  for (const auto& m : terms) sum.add(m);
  const auto dim = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(dyn.d()), s));
  return {detail::hermitize({dyn.d(), s, sum.result(Matrix::Zero(dim, dim))}), trace_norm(terms.back()), n_max + 1};
}

/// Operators with disjoint supports placed on label blocks of an s_total space.
inline Matrix place_blocks(const std::vector<const Matrix*>& ops, const std::vector<std::vector<int>>& blocks, int d,
                           int s_total) {
  Matrix w = Matrix::Identity(1, 1);
  std::vector<int> concat;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    w = kron(w, *ops[b]);
    concat.insert(concat.end(), blocks[b].begin(), blocks[b].end());
  }
  detail::check_labels(concat, s_total, "place_blocks");
  if (static_cast<int>(concat.size()) != s_total) throw LabelError("place_blocks: blocks must cover every label");
  std::vector<int> order(static_cast<std::size_t>(s_total));
  for (int p = 0; p < s_total; ++p) order[static_cast<std::size_t>(concat[static_cast<std::size_t>(p)] - 1)] = p + 1;
  return permute_particles(w, d, order);
}

/// Cluster expansion F_s = sum over partitions of {1..s} of prod over blocks,
/// with F_1 on singletons and G_|X| on larger blocks. Missing G's count as zero.
inline ManyBodyOperator cluster_assemble(const ManyBodyOperator& f1, const std::map<int, ManyBodyOperator>& correlations,
                                         int s) {
  if (f1.s != 1) throw DimensionError("cluster_assemble: F_1 must be one-particle");
  if (s < 1) throw DimensionError("cluster_assemble: s must be >= 1");
  for (const auto& [k, g] : correlations)
    if (g.s != k || g.d != f1.d) throw DimensionError("cluster_assemble: G_" + std::to_string(k) + " has wrong shape");
  const auto dim = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(f1.d), s));
  PairwiseSum<Matrix> sum;
  for_each_partition(static_cast<std::size_t>(s), [&](const std::vector<std::vector<std::size_t>>& blocks) {
    std::vector<const Matrix*> ops;
    std::vector<std::vector<int>> labels;
    for (const auto& b : blocks) {
      const int k = static_cast<int>(b.size());
      if (k == 1) {
        ops.push_back(&f1.matrix);
      } else {
        auto it = correlations.find(k);
        if (it == correlations.end()) return;
        ops.push_back(&it->second.matrix);
      }
      auto& l = labels.emplace_back();
      for (std::size_t idx : b) l.push_back(static_cast<int>(idx) + 1);
    }
    sum.add(place_blocks(ops, labels, f1.d, s));
  });
  return {f1.d, s, sum.result(Matrix::Zero(dim, dim)), f1.hermitian};
}

/// A stack of matrices as an RK4 state.
struct MatrixStack {
  std::vector<Matrix> items;
};

inline MatrixStack operator+(const MatrixStack& a, const MatrixStack& b) {
  MatrixStack out = a;
  for (std::size_t i = 0; i < out.items.size(); ++i) out.items[i] += b.items[i];
  return out;
}

inline MatrixStack operator*(double c, const MatrixStack& a) {
  MatrixStack out = a;
  for (auto& m : out.items) m *= c;
  return out;
}

inline double stack_norm(const MatrixStack& a) {
  double n = 0.0;
  for (const auto& m : a.items) n = std::max(n, max_abs(m));
  return n;
}

struct OracleOptions {
  rk4::Options rk4{};
  // close a grand-canonical sequence by F_{s_max+1} = 0 instead of refusing it
  bool truncate_at_s_max = false;
};

/// Integrates the finite-sector BBGKY hierarchy by RK4 and returns the marginal
/// sequence at each output time.
inline std::vector<MarginalSequence> hierarchy_ode_oracle(const MarginalSequence& f0, const std::vector<double>& times,
                                                          const Dynamics& dyn, const OracleOptions& opt = {}) {
  int n = f0.particles;
  if (f0.convention != MarginalConvention::finite_sector) {
    if (!opt.truncate_at_s_max)
      throw PreconditionError("hierarchy_ode_oracle: needs a finite sector (closed system)");
    n = f0.s_max();
  }
  if (n < 1 || f0.s_max() < n) throw PreconditionError("hierarchy_ode_oracle: initial data must extend to s = N");
  // integrate y_s = F_s / w_s with w_s = |F_s(0)|_tr so that every level has
  // unit size and the absolute error control is effectively relative
  std::vector<Matrix> hams;
  std::vector<double> w;
  MatrixStack y;
  for (int s = 1; s <= n; ++s) {
    hams.push_back(build_hamiltonian(s, dyn.model()).matrix);
    const auto& fs = f0.F[static_cast<std::size_t>(s)].matrix;
    const double norm = trace_norm(fs);
    w.push_back(norm > 0.0 ? norm : 1.0);
    y.items.push_back(fs / w.back());
  }
  const double eps = dyn.epsilon();
  auto rhs = [&](double, const MatrixStack& x) {
    MatrixStack dx;
    for (int s = 1; s <= n; ++s) {
      const auto i = static_cast<std::size_t>(s - 1);
      Matrix m = minus_i_commutator(hams[i], x.items[i]);
      if (s < n && eps != 0.0) m += (eps * w[i + 1] / w[i]) * collision_term(dyn, s, x.items[i + 1]);
      dx.items.push_back(std::move(m));
    }
    return dx;
  };
  const auto traj = rk4::integrate(rhs, y, 0.0, times, stack_norm, opt.rk4);
  std::vector<MarginalSequence> out;
  for (const auto& state : traj.states) {
    MarginalSequence m = f0;
    for (int s = 1; s <= n; ++s) {
      const auto i = static_cast<std::size_t>(s - 1);
      m.F[static_cast<std::size_t>(s)] = detail::hermitize({dyn.d(), s, w[i] * state.items[i]});
    }
    out.push_back(std::move(m));
  }
  return out;
}

/// Integrates the dual hierarchy
///   dG_s/dt = N_s G_s + eps sum_{j1 != j2} N_int(j1,j2) G_{s-1}(Y \ {j1})
/// for s = 1..s_max; G_0 is constant.
inline std::vector<OperatorSequence> dual_ode_oracle(const OperatorSequence& g0, const std::vector<double>& times,
                                                     const Dynamics& dyn, const OracleOptions& opt = {}) {
  const int top = g0.size() - 1;
  if (top < 1) throw PreconditionError("dual_ode_oracle: need G_1 at least");
  const int d = dyn.d();
  std::vector<Matrix> hams;
  MatrixStack y;
  for (int s = 1; s <= top; ++s) {
    hams.push_back(build_hamiltonian(s, dyn.model()).matrix);
    y.items.push_back(g0.items[static_cast<std::size_t>(s)].matrix);
  }
  // Phi(j1,j2) embedded in s particles, per s
  std::vector<std::vector<std::tuple<int, int, Matrix>>> pairs(static_cast<std::size_t>(top + 1));
  for (int s = 2; s <= top; ++s)
    for (int j1 = 1; j1 <= s; ++j1)
      for (int j2 = 1; j2 <= s; ++j2) {
        if (j1 == j2) continue;
        const int l[] = {j1, j2};
        pairs[static_cast<std::size_t>(s)].emplace_back(j1, j2, embed_matrix(dyn.model().pair_potential, d, l, s));
      }
  const double eps = dyn.epsilon();
  auto rhs = [&](double, const MatrixStack& x) {
    MatrixStack dx;
    for (int s = 1; s <= top; ++s) {
      const auto i = static_cast<std::size_t>(s - 1);
      // N_s G = i(H G - G H) = -(-i[H, G])
      Matrix m = -minus_i_commutator(hams[i], x.items[i]);
      if (s >= 2 && eps != 0.0) {
        const ManyBodyOperator prev(d, s - 1, x.items[i - 1]);
        for (const auto& [j1, j2, phi] : pairs[static_cast<std::size_t>(s)]) {
          std::vector<int> rest;
          for (int l = 1; l <= s; ++l)
            if (l != j1) rest.push_back(l);
          const Matrix g = tensor_embed(prev, rest, s).matrix;
          // N_int(j1,j2) g = -i[g, Phi]
          m += eps * cplx(0, -1) * (g * phi - phi * g);
        }
      }
      dx.items.push_back(std::move(m));
    }
    return dx;
  };
  const auto traj = rk4::integrate(rhs, y, 0.0, times, stack_norm, opt.rk4);
  std::vector<OperatorSequence> out;
  for (const auto& state : traj.states) {
    OperatorSequence g = g0;
    for (int s = 1; s <= top; ++s)
      g.items[static_cast<std::size_t>(s)].matrix = state.items[static_cast<std::size_t>(s - 1)];
    out.push_back(std::move(g));
  }
  return out;
}

/// Marginals of the directly evolved N-particle state.
inline MarginalSequence evolved_sector_marginals(const ManyBodyOperator& density, double t, int s_max,
                                                 const Dynamics& dyn) {
  return marginals_from_sector(dyn.propagator(density.s).evolve_state(density, t), s_max);
}

}  // namespace bbgky
