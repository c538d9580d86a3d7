#pragma once

// Dense many-particle operators on (C^d)^{\otimes s}.
//
// Basis ordering: the composite index of |a_1 ... a_s> is
// a_1 d^{s-1} + ... + a_s, so particle 1 is the most significant factor and
// kron(A, B) places A on particle 1. Particle labels are 1-based throughout.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "bbgky/error.hpp"

namespace bbgky {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kStructuralTol = 1e-10;
inline constexpr std::size_t kDefaultDimCap = 4096;

inline std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

/// An s-particle operator. s = 0 is a scalar stored as a 1x1 matrix.
struct ManyBodyOperator {
  int d = 1;
  int s = 0;
  Matrix matrix = Matrix::Zero(1, 1);
  bool hermitian = false;

  ManyBodyOperator() = default;
  ManyBodyOperator(int d_, int s_, Matrix m, bool herm = false)
      : d(d_), s(s_), matrix(std::move(m)), hermitian(herm) {
    if (d < 1 || s < 0) throw DimensionError("ManyBodyOperator: need d >= 1 and s >= 0");
    const auto n = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(d), s));
    if (matrix.rows() != n || matrix.cols() != n)
      throw DimensionError("ManyBodyOperator: matrix is " + std::to_string(matrix.rows()) + "x" +
                           std::to_string(matrix.cols()) + ", expected d^s = " + std::to_string(n));
  }

  static ManyBodyOperator scalar(int d, cplx value) {
    Matrix m(1, 1);
    m(0, 0) = value;
    return {d, 0, std::move(m), value.imag() == 0.0};
  }
  static ManyBodyOperator zero(int d, int s) {
    const auto n = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(d), s));
    return {d, s, Matrix::Zero(n, n), true};
  }
  static ManyBodyOperator identity(int d, int s) {
    const auto n = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(d), s));
    return {d, s, Matrix::Identity(n, n), true};
  }

  Eigen::Index dim() const { return matrix.rows(); }
  cplx trace() const { return matrix.trace(); }
};

inline void require_same_shape(const ManyBodyOperator& a, const ManyBodyOperator& b, const char* what) {
  if (a.d != b.d || a.s != b.s)
    throw DimensionError(std::string(what) + ": operands differ (d=" + std::to_string(a.d) + ", s=" +
                         std::to_string(a.s) + " vs d=" + std::to_string(b.d) + ", s=" + std::to_string(b.s) + ")");
}

inline ManyBodyOperator operator+(const ManyBodyOperator& a, const ManyBodyOperator& b) {
  require_same_shape(a, b, "operator+");
  return {a.d, a.s, a.matrix + b.matrix, a.hermitian && b.hermitian};
}
inline ManyBodyOperator operator-(const ManyBodyOperator& a, const ManyBodyOperator& b) {
  require_same_shape(a, b, "operator-");
  return {a.d, a.s, a.matrix - b.matrix, a.hermitian && b.hermitian};
}
inline ManyBodyOperator operator*(double c, const ManyBodyOperator& a) {
  return {a.d, a.s, c * a.matrix, a.hermitian};
}

namespace detail {

// Validates labels (1-based, distinct, <= s_total).
inline void check_labels(std::span<const int> labels, int s_total, const char* what) {
  std::vector<bool> seen(static_cast<std::size_t>(s_total) + 1, false);
  for (int l : labels) {
    if (l < 1 || l > s_total)
      throw LabelError(std::string(what) + ": label " + std::to_string(l) + " outside 1.." + std::to_string(s_total));
    if (seen[static_cast<std::size_t>(l)])
      throw LabelError(std::string(what) + ": duplicate label " + std::to_string(l));
    seen[static_cast<std::size_t>(l)] = true;
  }
}

// Index table for a relabelling: result particle k carries input particle order[k-1].
inline std::vector<Eigen::Index> permutation_index_map(int d, std::span<const int> order) {
  const int s = static_cast<int>(order.size());
  const std::size_t n = ipow(static_cast<std::size_t>(d), s);
  std::vector<std::size_t> stride(static_cast<std::size_t>(s));
  for (int p = 0; p < s; ++p) stride[static_cast<std::size_t>(p)] = ipow(static_cast<std::size_t>(d), s - 1 - p);
  std::vector<Eigen::Index> map(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t rem = r, in = 0;
    for (int k = 0; k < s; ++k) {
      const std::size_t digit = rem / stride[static_cast<std::size_t>(k)];
      rem %= stride[static_cast<std::size_t>(k)];
      in += digit * stride[static_cast<std::size_t>(order[static_cast<std::size_t>(k)] - 1)];
    }
    map[r] = static_cast<Eigen::Index>(in);
  }
  return map;
}

}  // namespace detail

/// Relabels tensor factors: particle k of the result is particle order[k-1] of m.
inline Matrix permute_particles(const Matrix& m, int d, std::span<const int> order) {
  detail::check_labels(order, static_cast<int>(order.size()), "permute_particles");
  const auto map = detail::permutation_index_map(d, order);
  const auto n = static_cast<Eigen::Index>(map.size());
  if (m.rows() != n || m.cols() != n) throw DimensionError("permute_particles: matrix size mismatch");
  Matrix out(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) out(r, c) = m(map[static_cast<std::size_t>(r)], map[static_cast<std::size_t>(c)]);
  return out;
}

inline ManyBodyOperator permute_particles(const ManyBodyOperator& op, std::span<const int> order) {
  if (static_cast<int>(order.size()) != op.s) throw DimensionError("permute_particles: order length != s");
  return {op.d, op.s, permute_particles(op.matrix, op.d, order), op.hermitian};
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ManyBodyOperator tensor(const ManyBodyOperator& a, const ManyBodyOperator& b) {
  if (a.d != b.d) throw DimensionError("tensor: one-particle dimensions differ");
  return {a.d, a.s + b.s, kron(a.matrix, b.matrix), a.hermitian && b.hermitian};
}

/// op^{\otimes s}; s = 0 gives the scalar 1.
inline ManyBodyOperator tensor_power(const ManyBodyOperator& op, int s) {
  ManyBodyOperator out = ManyBodyOperator::scalar(op.d, 1.0);
  for (int i = 0; i < s; ++i) out = tensor(out, op);
  return out;
}

/// Matrix form of tensor_embed: m acts on factors `labels` (in that order) of an
/// s_total-particle space, identity on the rest.
inline Matrix embed_matrix(const Matrix& m, int d, std::span<const int> labels, int s_total) {
  detail::check_labels(labels, s_total, "tensor_embed");
  const int k = static_cast<int>(labels.size());
  if (m.rows() != static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(d), k)))
    throw DimensionError("tensor_embed: operator size does not match label count");
  std::vector<int> concat(labels.begin(), labels.end());
  for (int l = 1; l <= s_total; ++l)
    if (std::find(labels.begin(), labels.end(), l) == labels.end()) concat.push_back(l);
  const auto rest = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(d), s_total - k));
  Matrix big = kron(m, Matrix::Identity(rest, rest));
  // position p of `big` carries label concat[p-1]; invert to get the relabelling order
  std::vector<int> order(static_cast<std::size_t>(s_total));
  for (int p = 0; p < s_total; ++p) order[static_cast<std::size_t>(concat[static_cast<std::size_t>(p)] - 1)] = p + 1;
  return permute_particles(big, d, order);
}

/// Places op on the named particles of an s_total-particle space.
inline ManyBodyOperator tensor_embed(const ManyBodyOperator& op, std::span<const int> labels, int s_total) {
  if (static_cast<int>(labels.size()) != op.s)
    throw LabelError("tensor_embed: " + std::to_string(labels.size()) + " labels for an s=" + std::to_string(op.s) +
                     " operator");
  return {op.d, s_total, embed_matrix(op.matrix, op.d, labels, s_total), op.hermitian};
}

/// Traces out every particle not in `keep`. Kept particles are renumbered in
/// ascending label order. An empty keep set yields the scalar trace.
inline ManyBodyOperator partial_trace(const ManyBodyOperator& op, std::span<const int> keep) {
  detail::check_labels(keep, op.s, "partial_trace");
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  std::vector<int> traced;
  for (int l = 1; l <= op.s; ++l)
    if (!std::binary_search(kept.begin(), kept.end(), l)) traced.push_back(l);

  const auto d = static_cast<std::size_t>(op.d);
  const std::size_t nk = ipow(d, static_cast<int>(kept.size()));
  const std::size_t nt = ipow(d, static_cast<int>(traced.size()));
  auto stride = [&](int label) { return ipow(d, op.s - label); };

  // offset of each kept / traced multi-index inside the full index
  std::vector<std::size_t> koff(nk, 0), toff(nt, 0);
  for (std::size_t i = 0; i < nk; ++i) {
    std::size_t rem = i;
    for (int p = static_cast<int>(kept.size()) - 1; p >= 0; --p) {
      koff[i] += (rem % d) * stride(kept[static_cast<std::size_t>(p)]);
      rem /= d;
    }
  }
  for (std::size_t i = 0; i < nt; ++i) {
    std::size_t rem = i;
    for (int p = static_cast<int>(traced.size()) - 1; p >= 0; --p) {
      toff[i] += (rem % d) * stride(traced[static_cast<std::size_t>(p)]);
      rem /= d;
    }
  }
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(nk), static_cast<Eigen::Index>(nk));
  for (std::size_t c = 0; c < nk; ++c)
    for (std::size_t r = 0; r < nk; ++r) {
      cplx acc = 0.0;
      for (std::size_t t = 0; t < nt; ++t)
        acc += op.matrix(static_cast<Eigen::Index>(koff[r] + toff[t]), static_cast<Eigen::Index>(koff[c] + toff[t]));
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
    }
  return {op.d, static_cast<int>(kept.size()), std::move(out), op.hermitian};
}

/// Keeps particles 1..keep_count.
inline ManyBodyOperator trace_out_tail(const ManyBodyOperator& op, int keep_count) {
  if (keep_count < 0 || keep_count > op.s) throw DimensionError("trace_out_tail: bad keep count");
  std::vector<int> keep(static_cast<std::size_t>(keep_count));
  std::iota(keep.begin(), keep.end(), 1);
  return partial_trace(op, keep);
}

inline double hermitian_defect(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Matrix& m, double tol = kStructuralTol) { return hermitian_defect(m) <= tol; }

/// Eigenvalues of the Hermitian part, ascending.
inline RealVector hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline RealVector singular_values(const Matrix& m) {
  if (is_hermitian(m, 1e-13 * std::max(1.0, m.cwiseAbs().maxCoeff()))) return hermitian_eigenvalues(m).cwiseAbs();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

inline double trace_norm(const Matrix& m) { return singular_values(m).sum(); }
inline double trace_norm(const ManyBodyOperator& op) { return trace_norm(op.matrix); }

inline double op_norm(const Matrix& m) { return m.size() == 0 ? 0.0 : singular_values(m).maxCoeff(); }
inline double op_norm(const ManyBodyOperator& op) { return op_norm(op.matrix); }

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline ManyBodyOperator commutator(const ManyBodyOperator& a, const ManyBodyOperator& b) {
  require_same_shape(a, b, "commutator");
  return {a.d, a.s, a.matrix * b.matrix - b.matrix * a.matrix, false};
}

/// Largest deviation under adjacent particle swaps; zero iff the operator is
/// invariant under every permutation (adjacent swaps generate S_s).
inline double permutation_defect(const ManyBodyOperator& op) {
  double worst = 0.0;
  std::vector<int> order(static_cast<std::size_t>(op.s));
  for (int k = 1; k < op.s; ++k) {
    std::iota(order.begin(), order.end(), 1);
    std::swap(order[static_cast<std::size_t>(k - 1)], order[static_cast<std::size_t>(k)]);
    worst = std::max(worst, max_abs(permute_particles(op.matrix, op.d, order) - op.matrix));
  }
  return worst;
}

inline bool is_permutation_symmetric(const ManyBodyOperator& op, double tol = kStructuralTol) {
  return permutation_defect(op) <= tol;
}

/// Average over all s! relabellings.
inline ManyBodyOperator symmetrize(const ManyBodyOperator& op) {
  std::vector<int> order(static_cast<std::size_t>(op.s));
  std::iota(order.begin(), order.end(), 1);
  Matrix acc = Matrix::Zero(op.dim(), op.dim());
  std::size_t count = 0;
  do {
    acc += permute_particles(op.matrix, op.d, order);
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  return {op.d, op.s, acc / static_cast<double>(count), op.hermitian};
}

/// Smallest eigenvalue of the Hermitian part.
inline double min_eigenvalue(const Matrix& m) { return m.size() == 0 ? 0.0 : hermitian_eigenvalues(m).minCoeff(); }

}  // namespace bbgky
