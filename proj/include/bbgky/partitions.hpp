#pragma once

// Set partitions of a list of elements, where an element is either a single
// particle label or a cluster of labels that must stay together.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bbgky/error.hpp"

namespace bbgky {

inline constexpr std::size_t kMaxPartitionElements = 12;

struct PartitionElement {
  std::vector<int> labels;  // ordered; size 1 for a single particle
  bool cluster = false;

  static PartitionElement single(int label) { return {{label}, false}; }
  static PartitionElement make_cluster(std::vector<int> labels) {
    for (std::size_t i = 0; i < labels.size(); ++i)
      for (std::size_t j = i + 1; j < labels.size(); ++j)
        if (labels[i] == labels[j]) throw LabelError("cluster: duplicate label " + std::to_string(labels[i]));
    return {std::move(labels), true};
  }

  friend bool operator==(const PartitionElement&, const PartitionElement&) = default;
};

/// Singles 1..n.
inline std::vector<PartitionElement> singles(int first, int last) {
  std::vector<PartitionElement> out;
  for (int l = first; l <= last; ++l) out.push_back(PartitionElement::single(l));
  return out;
}

struct SetPartition {
  std::vector<std::vector<PartitionElement>> blocks;

  std::size_t size() const { return blocks.size(); }
};

/// Restricted-growth-string enumerator over partitions of {0, ..., n-1}.
///
/// a[0] = 0 and a[i] <= 1 + max(a[0..i-1]); each string is one partition with
/// element i in block a[i]. Strings are produced in lexicographic order.
class RestrictedGrowth {
 public:
  explicit RestrictedGrowth(std::size_t n) : a_(n, 0), prefix_max_(n, 0) {
    if (n == 0) throw PreconditionError("partition enumeration needs at least one element");
    if (n > kMaxPartitionElements)
      throw CapExceeded("partition enumeration capped at " + std::to_string(kMaxPartitionElements) + " elements, got " +
                        std::to_string(n));
  }

  const std::vector<int>& current() const { return a_; }
  int block_count() const { return (a_.empty() ? 0 : prefix_max_.back()) + 1; }

  /// Advances to the next string; false once exhausted.
  bool next() {
    for (std::size_t i = a_.size(); i-- > 1;) {
      if (a_[i] <= prefix_max_[i - 1]) {
        ++a_[i];
        prefix_max_[i] = std::max(prefix_max_[i - 1], a_[i]);
        for (std::size_t j = i + 1; j < a_.size(); ++j) {
          a_[j] = 0;
          prefix_max_[j] = prefix_max_[i];
        }
        return true;
      }
    }
    return false;
  }

  /// Element indices per block.
  std::vector<std::vector<std::size_t>> blocks() const {
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(block_count()));
    for (std::size_t i = 0; i < a_.size(); ++i) out[static_cast<std::size_t>(a_[i])].push_back(i);
    return out;
  }

 private:
  std::vector<int> a_;
  std::vector<int> prefix_max_;
};

/// Calls visit(blocks) with element-index blocks for every partition of n elements.
template <class Visit>
void for_each_partition(std::size_t n, Visit&& visit) {
  RestrictedGrowth rg(n);
  do {
    visit(rg.blocks());
  } while (rg.next());
}

/// Lazily yields every partition of `elements`.
class PartitionStream {
 public:
  explicit PartitionStream(std::vector<PartitionElement> elements)
      : elements_(std::move(elements)), rg_(elements_.size()) {}

  std::optional<SetPartition> next() {
    if (done_) return std::nullopt;
    SetPartition p;
    for (const auto& block : rg_.blocks()) {
      auto& out = p.blocks.emplace_back();
      for (std::size_t idx : block) out.push_back(elements_[idx]);
    }
    done_ = !rg_.next();
    return p;
  }

 private:
  std::vector<PartitionElement> elements_;
  RestrictedGrowth rg_;
  bool done_ = false;
};

inline PartitionStream enumerate_partitions(std::vector<PartitionElement> elements) {
  return PartitionStream(std::move(elements));
}

/// (-1)^{k-1} (k-1)!
inline std::int64_t cumulant_coefficient(int block_count) {
  if (block_count < 1) throw PreconditionError("cumulant_coefficient: block count must be >= 1");
  std::int64_t f = 1;
  for (int i = 2; i < block_count; ++i) f *= i;
  return (block_count % 2 == 1) ? f : -f;
}

/// Bell numbers via the Bell triangle.
inline std::uint64_t bell_number(int n) {
  if (n < 0) throw PreconditionError("bell_number: n must be >= 0");
  std::vector<std::uint64_t> row{1};
  for (int i = 0; i < n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (auto v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

}  // namespace bbgky
