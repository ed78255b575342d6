#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace caselink::detail {

/// Length of the chunks parallel_chunks uses; chunk k starts at k * length.
inline std::size_t chunk_length(std::size_t n, unsigned threads) {
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2 * static_cast<std::size_t>(threads)) return std::max<std::size_t>(n, 1);
  return (n + threads - 1) / threads;
}

inline std::size_t chunk_count(std::size_t n, unsigned threads) {
  const auto len = chunk_length(n, threads);
  return std::max<std::size_t>(1, (n + len - 1) / len);
}

/// Calls fn(begin, end) over contiguous chunks of [0, n), one per thread.
/// Returns after every chunk has finished.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2 * static_cast<std::size_t>(threads)) {
    fn(std::size_t{0}, n);
    return;
  }
  const auto chunk = chunk_length(n, threads);
  std::vector<std::jthread> workers;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    workers.emplace_back([&fn, begin, end = std::min(n, begin + chunk)] { fn(begin, end); });
  }
}

}  // namespace caselink::detail
