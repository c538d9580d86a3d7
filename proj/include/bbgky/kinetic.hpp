#pragma once

// Generalized quantum kinetic equation for F_1(t).
//
// Scattering operators G^_n(t) = G_n(-t) prod_i G_1(t,i) (G^_1 = I), their
// cumulants A^_n, the low-order evolution operators V_1, V_2, the functionals
// F_s(t | F_1(t)), and the closed equation
//   dF_1/dt = -N_1 F_1 + eps Tr_2 (-N_int(1,2)) F_2(t | F_1(t)).

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "bbgky/hierarchies.hpp"

namespace bbgky {

/// f -> G^_n(t) f as a single conjugation.
class ScatteringOperator {
 public:
  ScatteringOperator(double t, int n, const Dynamics& dyn)
      : n_(n), w_(dyn.conjugator(GroupKind::scattering, n, t)) {
    if (n < 1) throw DimensionError("scattering_operator: n must be >= 1");
  }

  int particles() const { return n_; }
  const Matrix& conjugator() const { return w_; }

  ManyBodyOperator apply(const ManyBodyOperator& f) const {
    if (f.s != n_) throw DimensionError("scattering_operator: operand has s != n");
    return {f.d, f.s, w_ * f.matrix * w_.adjoint(), f.hermitian};
  }

 private:
  int n_;
  Matrix w_;
};

inline ScatteringOperator scattering_operator(double t, int n, const Dynamics& dyn) { return {t, n, dyn}; }

/// |(G^_s(t) - I) f - eps int_0^t G_s(-tau) (-sum N_int) prod_i G_1(tau,i) f dtau|_tr
inline double scattering_duhamel_residual(double t, const ManyBodyOperator& f, const Dynamics& dyn,
                                          const AdaptiveOptions& quad = {}) {
  const int s = f.s;
  if (f.d != dyn.d() || s < 1) throw DimensionError("scattering_duhamel_residual: operand does not fit the model");
  if (t == 0.0 || dyn.epsilon() == 0.0 || s == 1) return 0.0;
  const Matrix lhs = scattering_operator(t, s, dyn).apply(f).matrix - f.matrix;
  const Matrix& phi = dyn.interaction(s);
  auto integrand = [&](double tau) -> Matrix {
    const Matrix u0 = dyn.free_unitary(s, -tau);
    const Matrix u = dyn.unitary(s, tau);
    return u * minus_i_commutator(phi, u0 * f.matrix * u0.adjoint()) * u.adjoint();
  };
  auto eval = [&](int panels) { return integrate_composite<Matrix>(integrand, 0.0, t, panels, Matrix::Zero(f.dim(), f.dim())); };
  auto dist = [](const Matrix& a, const Matrix& b) { return trace_norm(a - b); };
  const auto integral = refine_until_converged<Matrix>(eval, dist, quad);
  return trace_norm(lhs - dyn.epsilon() * integral.value);
}

/// Partition-sum cumulant of scattering operators.
inline ManyBodyOperator scattering_cumulant(double t, std::span<const PartitionElement> elements,
                                            const ManyBodyOperator& operand, const Dynamics& dyn) {
  return cumulant(BlockGroup(dyn, GroupKind::scattering, t), elements, operand);
}

enum class VForm {
  cumulant,    // V_2 = A^_2(Y,s+1) - A^_1(Y) sum_j A^_2(j,s+1)
  scattering,  // V_2 = G^_{s+1} - G^_s sum_j G^_2(j,s+1) + (s-1) G^_s
};

/// V_{1+n}(t, {1..s}, s+1..s+n) applied to an (s+n)-particle operand; n in {0, 1}.
inline ManyBodyOperator evolution_operator_V(double t, int n, int s, const ManyBodyOperator& operand,
                                             const Dynamics& dyn, VForm form = VForm::cumulant) {
  if (n < 0) throw PreconditionError("evolution_operator_V: n must be >= 0");
  if (n >= 2)
    throw UnsupportedOrder("evolution_operator_V: no closed form implemented for V_" + std::to_string(1 + n));
  if (s < 1) throw DimensionError("evolution_operator_V: cluster must hold at least one particle");
  if (operand.s != s + n || operand.d != dyn.d())
    throw DimensionError("evolution_operator_V: operand must have s + n particles");

  const BlockGroup group(dyn, GroupKind::scattering, t);
  const auto cluster = PartitionElement::make_cluster(label_range(1, s));
  const auto ys = label_range(1, s);
  if (n == 0) {
    const PartitionElement elements[] = {cluster};
    return cumulant(group, elements, operand);
  }

  if (form == VForm::cumulant) {
    const PartitionElement pair[] = {cluster, PartitionElement::single(s + 1)};
    ManyBodyOperator out = cumulant(group, pair, operand);
    const PartitionElement y_only[] = {cluster};
    for (int j = 1; j <= s; ++j) {
      const PartitionElement jpair[] = {PartitionElement::single(j), PartitionElement::single(s + 1)};
      out = out - cumulant(group, y_only, cumulant(group, jpair, operand));
    }
    return out;
  }

  const auto all = label_range(1, s + 1);
  ManyBodyOperator out = group.apply(all, operand) + static_cast<double>(s - 1) * group.apply(ys, operand);
  for (int j = 1; j <= s; ++j) {
    const int jpair[] = {j, s + 1};
    out = out - group.apply(ys, group.apply(jpair, operand));
  }
  return out;
}

/// Result of a kinetic-level series, with the convergence-condition check.
struct KineticResult {
  ManyBodyOperator value;
  double last_term_norm = 0.0;
  bool norm_condition_met = true;  // |F_1|_tr < 1/e
  std::string warning;
};

namespace detail {

inline void check_norm_condition(const ManyBodyOperator& f1, KineticResult& r) {
  const double norm = trace_norm(f1);
  if (norm >= std::exp(-1.0)) {
    r.norm_condition_met = false;
    r.warning = "|F_1|_tr = " + std::to_string(norm) + " is not below 1/e; expansion may diverge";
  }
}

}  // namespace detail

/// Builds the k-particle operator the V's act on; default is F_1^{(x)k}.
using ProductBuilder = std::function<ManyBodyOperator(const ManyBodyOperator& f1, int k)>;

inline ManyBodyOperator product_state(const ManyBodyOperator& f1, int k) { return tensor_power(f1, k); }

/// F_s(t | F_1(t)) = sum_{n=0}^{n_max} 1/n! Tr_{s+1..s+n} V_{1+n}(t) prod_{i<=s+n} F_1(t,i).
inline KineticResult functional_Fs(double t, int s, const ManyBodyOperator& f1, int n_max, const Dynamics& dyn,
                                   const ProductBuilder& product = product_state) {
  if (f1.s != 1 || f1.d != dyn.d()) throw DimensionError("functional_Fs: F_1 must be one-particle");
  if (n_max < 0) throw PreconditionError("functional_Fs: n_max must be >= 0");
  if (n_max >= 2) throw UnsupportedOrder("functional_Fs: evolution operators are implemented for n <= 1 only");
  KineticResult r;
  detail::check_norm_condition(f1, r);
  const auto dim = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(dyn.d()), s));
  Matrix sum = Matrix::Zero(dim, dim);
  for (int n = 0; n <= n_max; ++n) {
    const auto v = evolution_operator_V(t, n, s, product(f1, s + n), dyn);
    const Matrix term = trace_out_tail(v, s).matrix / factorial(n);
    r.last_term_norm = trace_norm(term);
    sum += term;
  }
  r.value = detail::hermitize({dyn.d(), s, sum});
  return r;
}

/// F_1(t) = sum_{n=0}^{n_max} 1/n! Tr_{2..1+n} A_{1+n}(-t, 1..1+n) prod_i F_1(0,i).
inline KineticResult f1_series(double t, const ManyBodyOperator& f1_0, int n_max, const Dynamics& dyn) {
  if (f1_0.s != 1 || f1_0.d != dyn.d()) throw DimensionError("f1_series: F_1 must be one-particle");
  KineticResult r;
  detail::check_norm_condition(f1_0, r);
  const auto series = bbgky_series(t, 1, chaotic_marginals(f1_0, 1 + n_max), n_max, dyn);
  r.value = series.value;
  r.last_term_norm = series.last_term_norm;
  return r;
}

/// -N_1 F_1 + eps Tr_2 (-N_int(1,2)) F_2(t | F_1).
inline Matrix gke_rhs_matrix(double t, const ManyBodyOperator& f1, int n_max, const Dynamics& dyn) {
  Matrix out = minus_i_commutator(dyn.model().kinetic, f1.matrix);
  if (dyn.epsilon() != 0.0) {
    const auto f2 = functional_Fs(t, 2, f1, n_max, dyn);
    out += dyn.epsilon() * collision_term(dyn, 1, f2.value.matrix);
  }
  return out;
}

inline ManyBodyOperator gke_rhs(double t, const ManyBodyOperator& f1, int n_max, const Dynamics& dyn) {
  if (f1.s != 1 || f1.d != dyn.d()) throw DimensionError("gke_rhs: F_1 must be one-particle");
  Matrix m = gke_rhs_matrix(t, f1, n_max, dyn);
  return {f1.d, 1, 0.5 * (m + m.adjoint()), true};
}

struct GkeTrajectory {
  std::vector<double> times;
  std::vector<ManyBodyOperator> states;
  double max_trace_drift = 0.0;
  double min_eigenvalue_floor = 0.0;  // smallest eigenvalue seen at any output time
  double max_trace_norm = 0.0;
  bool norm_condition_met = true;
  rk4::Stats stats;
};

/// RK4 integration of the kinetic equation, recording F_1 at `times`.
inline GkeTrajectory gke_integrate(const ManyBodyOperator& f1_0, const std::vector<double>& times, int n_max,
                                   const Dynamics& dyn, const rk4::Options& opt = {}) {
  if (f1_0.s != 1 || f1_0.d != dyn.d()) throw DimensionError("gke_integrate: F_1 must be one-particle");
  if (n_max < 0 || n_max >= 2) throw UnsupportedOrder("gke_integrate: n_max must be 0 or 1");
  const int d = dyn.d();
  auto rhs = [&](double t, const Matrix& x) -> Matrix {
    const Matrix m = gke_rhs_matrix(t, {d, 1, 0.5 * (x + x.adjoint())}, n_max, dyn);
    return 0.5 * (m + m.adjoint());
  };
  auto norm = [](const Matrix& m) { return max_abs(m); };
  const auto traj = rk4::integrate(rhs, Matrix(f1_0.matrix), 0.0, times, norm, opt);

  GkeTrajectory out;
  out.times = traj.times;
  out.stats = traj.stats;
  out.norm_condition_met = trace_norm(f1_0) < std::exp(-1.0);
  const cplx tr0 = f1_0.trace();
  out.min_eigenvalue_floor = min_eigenvalue(f1_0.matrix);
  for (const auto& m : traj.states) {
    ManyBodyOperator f = detail::hermitize({d, 1, m});
    out.max_trace_drift = std::max(out.max_trace_drift, std::abs(f.trace() - tr0));
    out.min_eigenvalue_floor = std::min(out.min_eigenvalue_floor, min_eigenvalue(f.matrix));
    out.max_trace_norm = std::max(out.max_trace_norm, trace_norm(f));
    out.states.push_back(std::move(f));
  }
  return out;
}

}  // namespace bbgky
