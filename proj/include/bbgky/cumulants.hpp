#pragma once

// Cumulants (semi-invariants) of evolution groups over set partitions:
//
//   A_n(t, e_1..e_n) = sum_P (-1)^{|P|-1} (|P|-1)! prod_{X in P} G_{|X|}(t, X)
//
// Each element e_i is a particle or a cluster of particles; a block's group acts
// jointly on the union of its elements' labels. Blocks have disjoint supports,
// so every product of block groups is a single conjugation X -> W X W^dagger.

#include <map>
#include <span>
#include <vector>

#include "bbgky/dynamics.hpp"
#include "bbgky/pairwise_sum.hpp"
#include "bbgky/partitions.hpp"

namespace bbgky {

/// A group of one kind frozen at time t, with conjugators cached per block size.
class BlockGroup {
 public:
  BlockGroup(const Dynamics& dyn, GroupKind kind, double t) : dyn_(&dyn), kind_(kind), t_(t) {}

  const Dynamics& dynamics() const { return *dyn_; }
  GroupKind kind() const { return kind_; }
  double time() const { return t_; }

  const Matrix& conjugator(int k) const {
    auto it = cache_.find(k);
    if (it == cache_.end()) it = cache_.emplace(k, dyn_->conjugator(kind_, k, t_)).first;
    return it->second;
  }

  /// W for a product of blocks with the given label sets inside an s_total space;
  /// labels not in any block get the identity.
  Matrix product_conjugator(const std::vector<std::vector<int>>& blocks, int s_total) const {
    const int d = dyn_->d();
    std::vector<int> concat;
    Matrix w = Matrix::Identity(1, 1);
    for (const auto& b : blocks) {
      if (b.empty()) continue;
      w = kron(w, conjugator(static_cast<int>(b.size())));
      concat.insert(concat.end(), b.begin(), b.end());
    }
    detail::check_labels(concat, s_total, "cumulant");
    const int covered = static_cast<int>(concat.size());
    if (covered < s_total) {
      for (int l = 1; l <= s_total; ++l)
        if (std::find(concat.begin(), concat.begin() + covered, l) == concat.begin() + covered) concat.push_back(l);
      const auto rest = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(d), s_total - covered));
      w = kron(w, Matrix::Identity(rest, rest));
    }
    std::vector<int> order(static_cast<std::size_t>(s_total));
    for (int p = 0; p < s_total; ++p) order[static_cast<std::size_t>(concat[static_cast<std::size_t>(p)] - 1)] = p + 1;
    return permute_particles(w, d, order);
  }

  /// Applies one block group on `labels` of the operand.
  ManyBodyOperator apply(std::span<const int> labels, const ManyBodyOperator& x) const {
    const Matrix w = product_conjugator({std::vector<int>(labels.begin(), labels.end())}, x.s);
    return {x.d, x.s, w * x.matrix * w.adjoint(), x.hermitian};
  }

 private:
  const Dynamics* dyn_;
  GroupKind kind_;
  double t_;
  mutable std::map<int, Matrix> cache_;
};

namespace detail {

inline void check_operand(const Dynamics& dyn, const ManyBodyOperator& operand, const char* what) {
  if (operand.d != dyn.d())
    throw DimensionError(std::string(what) + ": operand one-particle dimension " + std::to_string(operand.d) +
                         " != model d " + std::to_string(dyn.d()));
}

}  // namespace detail

/// The partition-sum cumulant of `group` over `elements`, applied to `operand`.
/// Labels of the operand not named by any element are left untouched.
inline ManyBodyOperator cumulant(const BlockGroup& group, std::span<const PartitionElement> elements,
                                 const ManyBodyOperator& operand) {
  detail::check_operand(group.dynamics(), operand, "cumulant");
  std::vector<int> all;
  for (const auto& e : elements) all.insert(all.end(), e.labels.begin(), e.labels.end());
  detail::check_labels(all, operand.s, "cumulant");

  PairwiseSum<Matrix> sum;
  for_each_partition(elements.size(), [&](const std::vector<std::vector<std::size_t>>& blocks) {
    std::vector<std::vector<int>> label_blocks;
    for (const auto& b : blocks) {
      auto& lb = label_blocks.emplace_back();
      for (std::size_t idx : b) lb.insert(lb.end(), elements[idx].labels.begin(), elements[idx].labels.end());
    }
    const Matrix w = group.product_conjugator(label_blocks, operand.s);
    const double c = static_cast<double>(cumulant_coefficient(static_cast<int>(blocks.size())));
    sum.add(c * (w * operand.matrix * w.adjoint()));
  });
  return {operand.d, operand.s, sum.result(Matrix::Zero(operand.dim(), operand.dim())), operand.hermitian};
}

/// A_n(t) built from G(t) (Heisenberg picture).
inline ManyBodyOperator cumulant_forward(double t, std::span<const PartitionElement> elements,
                                         const ManyBodyOperator& operand, const Dynamics& dyn) {
  return cumulant(BlockGroup(dyn, GroupKind::heisenberg, t), elements, operand);
}

/// A_n(-t) built from G(-t) (von Neumann picture).
inline ManyBodyOperator cumulant_backward(double t, std::span<const PartitionElement> elements,
                                          const ManyBodyOperator& operand, const Dynamics& dyn) {
  return cumulant(BlockGroup(dyn, GroupKind::von_neumann, t), elements, operand);
}

/// Sum over partitions of {1..n} of the product of block cumulants applied to
/// `operand`. By Moebius inversion this reproduces the group itself.
inline ManyBodyOperator cumulant_product_sum(const BlockGroup& group, const ManyBodyOperator& operand) {
  detail::check_operand(group.dynamics(), operand, "cumulant_product_sum");
  const int n = operand.s;
  PairwiseSum<Matrix> sum;
  for_each_partition(static_cast<std::size_t>(n), [&](const std::vector<std::vector<std::size_t>>& blocks) {
    ManyBodyOperator x = operand;
    for (const auto& b : blocks) {
      std::vector<PartitionElement> elements;
      for (std::size_t idx : b) elements.push_back(PartitionElement::single(static_cast<int>(idx) + 1));
      x = cumulant(group, elements, x);
    }
    sum.add(std::move(x.matrix));
  });
  return {operand.d, operand.s, sum.result(Matrix::Zero(operand.dim(), operand.dim())), operand.hermitian};
}

/// One row of the small-time generator check.
struct GeneratorCheckRow {
  int order;
  double t;
  double residual;
};

/// Small-t behaviour of A_n(t) g for a given n-particle operand g:
///   n = 1:  |A_1(t)g - g - t N g| / t
///   n = 2:  |A_2(t)g / t - eps N_int(1,2) g|
///   n > 2:  |A_n(t)g / t|
/// Norms are trace norms. Each residual should vanish as t -> 0.
inline std::vector<GeneratorCheckRow> generator_order_check(int n, const Dynamics& dyn, std::span<const double> t_list,
                                                            const ManyBodyOperator& g) {
  if (n < 1 || n > 4) throw PreconditionError("generator_order_check: n must be in 1..4");
  if (g.s != n) throw DimensionError("generator_order_check: operand must have s = n");
  const auto elements = singles(1, n);
  std::vector<GeneratorCheckRow> rows;
  for (double t : t_list) {
    const auto a = cumulant_forward(t, elements, g, dyn);
    double r = 0.0;
    if (n == 1) {
      const auto h = build_hamiltonian(1, dyn.model());
      r = trace_norm(a.matrix - g.matrix - t * generator_heisenberg(g, h).matrix) / t;
    } else if (n == 2) {
      r = trace_norm(a.matrix / t - dyn.epsilon() * interaction_generator(g, 1, 2, dyn.model()).matrix);
    } else {
      r = trace_norm(a.matrix) / t;
    }
    rows.push_back({n, t, r});
  }
  return rows;
}

}  // namespace bbgky
