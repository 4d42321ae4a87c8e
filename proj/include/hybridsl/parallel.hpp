#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace hybridsl {

/// Runs body(begin, end) over contiguous chunks of [0, count). Chunks are
/// disjoint, so bodies writing only to their own slots need no locking.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  constexpr std::size_t kMinChunk = 2048;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count / kMinChunk + 1);
  if (workers <= 1) {
    body(std::size_t{0}, count);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin < end) pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(std::size_t{0}, std::min(count, chunk));
}

/// Hardware concurrency, at least 1.
inline int default_threads() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace hybridsl
