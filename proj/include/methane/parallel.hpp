#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace methane {

// Number of worker threads used by parallel loops. 0 restores the OpenMP
// default. Results never depend on this value: work is split into chunks
// whose boundaries depend only on the problem size, and reductions combine
// chunk results in a fixed order.
void set_num_threads(int threads);
int num_threads();

// Calls fn(begin, end) for consecutive chunks of [0, count) of at most
// `chunk` items. Runs serially when already inside a parallel region.
void parallel_chunks(std::size_t count, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& fn);

inline std::size_t chunk_count(std::size_t count, std::size_t chunk) {
  return (count + chunk - 1) / chunk;
}

// Computes partial(begin, end) for every chunk of [0, count) and folds the
// results with a pairwise tree whose shape depends only on the chunk count,
// so the rounding of the total is independent of the thread count.
template <class T, class Partial, class Combine>
T reduce_chunks(std::size_t count, std::size_t chunk, Partial&& partial, Combine&& combine) {
  const std::size_t n = chunk_count(count, chunk);
  if (n == 0) return T{};
  std::vector<T> parts(n);
  parallel_chunks(count, chunk, [&](std::size_t begin, std::size_t end) { parts[begin / chunk] = partial(begin, end); });
  for (std::size_t stride = 1; stride < n; stride *= 2) {
    for (std::size_t i = 0; i + stride < n; i += 2 * stride) combine(parts[i], parts[i + stride]);
  }
  return std::move(parts.front());
}

}  // namespace methane
