#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace bbgky {

/// Streaming pairwise (binary tree) summation.
///
/// Slot k holds the sum of a complete subtree of 2^k consecutive terms, so the
/// reduction tree depends only on the number of terms, never on timing. Error
/// growth is O(log n) instead of O(n) for the alternating-sign partition sums.
template <class T>
class PairwiseSum {
 public:
  void add(T value) {
    std::size_t level = 0;
    while (level < slots_.size() && slots_[level]) {
      value = std::move(*slots_[level]) + value;
      slots_[level].reset();
      ++level;
    }
    if (level == slots_.size()) slots_.emplace_back();
    slots_[level] = std::move(value);
    ++count_;
  }

  std::size_t count() const { return count_; }
  bool empty() const { return count_ == 0; }

  /// Combined sum; `zero` is returned for an empty accumulator.
  T result(T zero) const {
    std::optional<T> acc;
    for (const auto& slot : slots_) {
      if (!slot) continue;
      acc = acc ? T(*slot + *acc) : T(*slot);
    }
    return acc ? std::move(*acc) : std::move(zero);
  }

 private:
  std::vector<std::optional<T>> slots_;
  std::size_t count_ = 0;
};

}  // namespace bbgky
