#pragma once

// Mean-field (eps -> 0) limit: the quantum Vlasov equation, the Vlasov and dual
// Vlasov hierarchies, and the scaling sweeps that compare the eps = 1/N
// finite-sector hierarchy with its limit.

#include <cmath>
#include <functional>
#include <vector>

#include "bbgky/hierarchies.hpp"

namespace bbgky {

/// Mean-field potential V = Tr_2 [Phi (I (x) f)].
inline Matrix mean_field_potential(const Matrix& f, const ModelConfig& cfg) {
  const int d = cfg.d;
  Matrix v = Matrix::Zero(d, d);
  const Matrix& phi = cfg.pair_potential;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      cplx acc = 0.0;
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) acc += phi(a * d + c, b * d + e) * f(e, c);
      v(a, b) = acc;
    }
  return v;
}

/// -N_0 f + Tr_2 (-N_int(1,2)) f (x) f = -i[K + V(f), f].
inline Matrix vlasov_rhs_matrix(const Matrix& f, const ModelConfig& cfg) {
  return minus_i_commutator(cfg.kinetic + mean_field_potential(f, cfg), f);
}

inline ManyBodyOperator vlasov_rhs(const ManyBodyOperator& f1, const ModelConfig& cfg) {
  if (f1.s != 1 || f1.d != cfg.d) throw DimensionError("vlasov_rhs: f_1 must be one-particle");
  Matrix m = vlasov_rhs_matrix(f1.matrix, cfg);
  return {f1.d, 1, 0.5 * (m + m.adjoint()), true};
}

struct VlasovTrajectory {
  std::vector<double> times;
  std::vector<ManyBodyOperator> states;
  double max_trace_drift = 0.0;
  double max_purity_drift = 0.0;  // |Tr f^2 - (Tr f)^2|, meaningful for rank-one data
  rk4::Stats stats;
};

inline VlasovTrajectory vlasov_solve(const ManyBodyOperator& f1_0, const std::vector<double>& times,
                                     const ModelConfig& cfg, const rk4::Options& opt = {}) {
  if (f1_0.s != 1 || f1_0.d != cfg.d) throw DimensionError("vlasov_solve: f_1 must be one-particle");
  auto rhs = [&](double, const Matrix& x) -> Matrix {
    const Matrix m = vlasov_rhs_matrix(x, cfg);
    return 0.5 * (m + m.adjoint());
  };
  auto norm = [](const Matrix& m) { return max_abs(m); };
  const auto traj = rk4::integrate(rhs, Matrix(f1_0.matrix), 0.0, times, norm, opt);
  VlasovTrajectory out;
  out.times = traj.times;
  out.stats = traj.stats;
  const cplx tr0 = f1_0.trace();
  for (const auto& m : traj.states) {
    ManyBodyOperator f = detail::hermitize({cfg.d, 1, m});
    const cplx tr = f.trace();
    out.max_trace_drift = std::max(out.max_trace_drift, std::abs(tr - tr0));
    out.max_purity_drift = std::max(out.max_purity_drift, std::abs((f.matrix * f.matrix).trace() - tr * tr));
    out.states.push_back(std::move(f));
  }
  return out;
}

/// f_s(t) of the Vlasov hierarchy by its iteration series (free groups, no eps),
/// started from chaotic data f_k(0) = f_1(0)^{(x)k}.
inline SeriesResult vlasov_hierarchy_series(double t, int s, const ManyBodyOperator& f1_0, int order,
                                            const Dynamics& dyn, const AdaptiveOptions& quad = {}) {
  if (order < 0 || order > 3) throw PreconditionError("vlasov_hierarchy_series: order must be in 0..3");
  return iteration_series(t, s, chaotic_marginals(f1_0, s + order), order, dyn, true, quad);
}

/// D_N for a given N.
using SectorBuilder = std::function<ManyBodyOperator(int particles)>;

/// D_N = rho^{(x)N}.
inline SectorBuilder product_sector(ManyBodyOperator rho) {
  return [rho = std::move(rho)](int particles) { return tensor_power(rho, particles); };
}

struct ChaosPoint {
  double epsilon;
  int particles;
  double t;
  double residual;
};

/// How the finite-sector marginals F_s(t) are obtained.
enum class SectorSolver {
  direct,     // evolve D_N with e^{-iH_N t} and take marginals
  hierarchy,  // integrate the finite hierarchy s = 1..N by RK4
};

/// |eps^s F_s(t) - f_1(t)^{(x)s}|_tr with eps = 1/N and f_1(t) from the Vlasov
/// equation started at eps F_1(0). The model's own epsilon is ignored.
inline std::vector<ChaosPoint> chaos_residual(int particles, int s, const std::vector<double>& times,
                                              const SectorBuilder& builder, const ModelConfig& model,
                                              SectorSolver solver = SectorSolver::direct,
                                              const OracleOptions& opt = {}) {
  if (particles < s) throw PreconditionError("chaos_residual: need N >= s");
  const double eps = 1.0 / particles;
  const Dynamics dyn(model.with_epsilon(eps));
  const auto density = builder(particles);
  const auto f0 = marginals_from_sector(density, particles);
  ManyBodyOperator f1_0 = f0.F[1];
  f1_0.matrix *= eps;

  std::vector<double> grid;
  for (double t : times)
    if (t > 0.0) grid.push_back(t);
  std::vector<MarginalSequence> hier;
  if (solver == SectorSolver::hierarchy && !grid.empty()) {
    hier = hierarchy_ode_oracle(f0, grid, dyn, opt);
  } else {
    for (double t : grid) hier.push_back(evolved_sector_marginals(density, t, s, dyn));
  }
  const auto vlasov = grid.empty() ? VlasovTrajectory{} : vlasov_solve(f1_0, grid, model, opt.rk4);

  std::vector<ChaosPoint> out;
  std::size_t k = 0;
  for (double t : times) {
    Matrix fs, f1t;
    if (t > 0.0) {
      fs = hier[k].F[static_cast<std::size_t>(s)].matrix;
      f1t = vlasov.states[k].matrix;
      ++k;
    } else {
      fs = f0.F[static_cast<std::size_t>(s)].matrix;
      f1t = f1_0.matrix;
    }
    const ManyBodyOperator f1op(model.d, 1, f1t);
    const double r = trace_norm(std::pow(eps, s) * fs - tensor_power(f1op, s).matrix);
    out.push_back({eps, particles, t, r});
  }
  return out;
}

struct CorrelationRow {
  double epsilon;
  double t;
  double norm;            // |eps^s G_s(t)|_tr
  double last_term_norm;  // eps^s times the last series term
};

/// |eps^s G_s(t)|_tr over an eps sweep, with F_1(0) = rho / eps so that
/// eps F_1(0) = rho. eps = 0 is the limit row and is exactly zero.
inline std::vector<CorrelationRow> correlation_vanishing(const std::vector<double>& epsilons, int s, double t,
                                                         const ManyBodyOperator& rho, int n_max,
                                                         const ModelConfig& model) {
  return parallel_map(epsilons.size(), [&](std::size_t i) -> CorrelationRow {
    const double eps = epsilons[i];
    if (eps == 0.0) return {0.0, t, 0.0, 0.0};
    const Dynamics dyn(model.with_epsilon(eps));
    ManyBodyOperator f1 = rho;
    f1.matrix /= eps;
    const auto g = correlation_series(t, s, f1, n_max, dyn);
    const double scale = std::pow(eps, s);
    return {eps, t, scale * trace_norm(g.value), scale * g.last_term_norm};
  });
}

/// Dual Vlasov hierarchy solution for additive data g(0) = (0, g_1, 0, ...):
///   g_1(t) = G_1^0(t) g_1
///   g_s(t) = int_0^t G_s^0(t - t1) sum_{j1 != j2} N_int(j1,j2) g_{s-1}(t1, Y \ {j1}) dt1.
inline ManyBodyOperator dual_vlasov_additive(double t, int s, const ManyBodyOperator& g1_0, const Dynamics& dyn,
                                             const AdaptiveOptions& quad = {}) {
  if (s < 1 || s > 4) throw PreconditionError("dual_vlasov_additive: s must be in 1..4");
  if (g1_0.s != 1 || g1_0.d != dyn.d()) throw DimensionError("dual_vlasov_additive: g_1 must be one-particle");
  const int d = dyn.d();
  const ModelConfig& cfg = dyn.model();

  auto heisenberg_free = [&](int k, double tau, const Matrix& x) -> Matrix {
    const Matrix w = dyn.free_unitary(k, -tau);
    return w * x * w.adjoint();
  };
  // sum_{j1 != j2} N_int(j1,j2) applied to g_{k-1} placed on Y \ {j1}
  auto interaction = [&](int k, const Matrix& prev) -> Matrix {
    const auto dim = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(d), k));
    Matrix out = Matrix::Zero(dim, dim);
    const ManyBodyOperator p(d, k - 1, prev);
    for (int j1 = 1; j1 <= k; ++j1) {
      std::vector<int> rest;
      for (int l = 1; l <= k; ++l)
        if (l != j1) rest.push_back(l);
      const Matrix g = tensor_embed(p, rest, k).matrix;
      for (int j2 = 1; j2 <= k; ++j2) {
        if (j2 == j1) continue;
        const int l[] = {j1, j2};
        const Matrix phi = embed_matrix(cfg.pair_potential, d, l, k);
        out += cplx(0, -1) * (g * phi - phi * g);
      }
    }
    return out;
  };
  std::function<Matrix(int, double, int)> g = [&](int k, double tau, int panels) -> Matrix {
    if (k == 1) return heisenberg_free(1, tau, g1_0.matrix);
    const auto dim = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(d), k));
    if (tau == 0.0) return Matrix::Zero(dim, dim);
    return integrate_composite<Matrix>(
        [&](double t1) { return heisenberg_free(k, tau - t1, interaction(k, g(k - 1, t1, panels))); }, 0.0, tau,
        panels, Matrix::Zero(dim, dim));
  };
  if (s == 1) return {d, 1, g(1, t, 1), g1_0.hermitian};
  auto eval = [&](int panels) { return g(s, t, panels); };
  auto dist = [](const Matrix& a, const Matrix& b) { return trace_norm(a - b); };
  return {d, s, refine_until_converged<Matrix>(eval, dist, quad).value, g1_0.hermitian};
}

/// sum_{s=1}^{s_max} 1/s! Tr g_s(t) f_1^{(x)s}.
inline double dual_vlasov_pairing(double t, int s_max, const ManyBodyOperator& g1_0, const ManyBodyOperator& f1_0,
                                  const Dynamics& dyn, const AdaptiveOptions& quad = {}) {
  const auto terms = parallel_map(static_cast<std::size_t>(s_max), [&](std::size_t i) {
    const int s = static_cast<int>(i) + 1;
    const auto gs = dual_vlasov_additive(t, s, g1_0, dyn, quad);
    return (gs.matrix.transpose().cwiseProduct(tensor_power(f1_0, s).matrix)).sum().real() / factorial(s);
  });
  double sum = 0.0;
  for (double v : terms) sum += v;
  return sum;
}

/// Least-squares line through (log x, log y).
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("fit_loglog: need at least two points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw PreconditionError("fit_loglog: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    sx += lx.back();
    sy += ly.back();
    sxx += lx.back() * lx.back();
    sxy += lx.back() * ly.back();
  }
  LogLogFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double pred = fit.intercept + fit.slope * lx[i];
    ss_res += (ly[i] - pred) * (ly[i] - pred);
    ss_tot += (ly[i] - mean) * (ly[i] - mean);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

/// Index of the largest diagonal entry (site occupation).
inline int argmax_site(const Matrix& f) {
  Eigen::Index best = 0;
  f.diagonal().real().maxCoeff(&best);
  return static_cast<int>(best);
}

/// Parameters of an eps -> 0 sweep.
struct ScalingSweep {
  std::vector<double> epsilons;  // strictly decreasing
  int s = 1;
  double horizon = 1.0;

  void validate() const {
    if (epsilons.empty()) throw PreconditionError("ScalingSweep: no epsilons");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
      if (!(epsilons[i] > 0.0)) throw PreconditionError("ScalingSweep: epsilons must be positive");
      if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
        throw PreconditionError("ScalingSweep: epsilons must be strictly decreasing");
    }
  }
};

}  // namespace bbgky
