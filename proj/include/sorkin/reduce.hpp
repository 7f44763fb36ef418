#pragma once
#include <atomic>
#include <cstddef>
#include <thread>
#include <utility>
#include <vector>

namespace sorkin {

/// Pairwise (tree) summation of term(0) .. term(n-1). The reduction shape is a
/// function of n alone, so results do not depend on evaluation batching.
template <class T, class F>
T pairwise_sum(std::size_t begin, std::size_t end, F&& term) {
  const std::size_t n = end - begin;
  if (n <= 32) {
    T acc{};
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = begin + n / 2;
  return pairwise_sum<T>(begin, mid, term) + pairwise_sum<T>(mid, end, term);
}

template <class T, class F>
T pairwise_sum(std::size_t n, F&& term) {
  return pairwise_sum<T>(0, n, std::forward<F>(term));
}

/// Runs f(i) for i in [0, n) on up to hardware_concurrency workers. Each index
/// owns its output slot, so the result is independent of scheduling.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  if (static_cast<std::size_t>(workers) > n) workers = static_cast<unsigned>(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace sorkin
