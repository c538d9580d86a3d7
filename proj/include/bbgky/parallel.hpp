#pragma once

// Index-parallel map with results stored by position, so the outcome never
// depends on scheduling. Nested calls run serially on the calling thread.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <future>
#include <type_traits>
#include <vector>

namespace bbgky {

namespace detail {
inline std::atomic<int>& thread_budget() {
  static std::atomic<int> n{1};
  return n;
}
inline bool& inside_parallel_region() {
  thread_local bool flag = false;
  return flag;
}
}  // namespace detail

inline void set_thread_count(int n) { detail::thread_budget() = std::max(1, n); }
inline int thread_count() { return detail::thread_budget().load(); }

template <class F>
auto parallel_map(std::size_t count, F&& f) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(count);
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
  if (workers <= 1 || detail::inside_parallel_region()) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::future<void>> tasks;
  for (std::size_t w = 0; w < workers; ++w)
    tasks.push_back(std::async(std::launch::async, [&, w] {
      detail::inside_parallel_region() = true;
      for (std::size_t i = w; i < count; i += workers) out[i] = f(i);
    }));
  for (auto& t : tasks) t.get();
  return out;
}

}  // namespace bbgky
