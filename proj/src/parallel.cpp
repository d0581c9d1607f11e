#include "methane/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <mutex>

namespace methane {
namespace {
int g_default_threads = -1;
}

void set_num_threads(int threads) {
  if (g_default_threads < 0) g_default_threads = omp_get_max_threads();
  omp_set_num_threads(threads > 0 ? threads : g_default_threads);
}

int num_threads() { return omp_get_max_threads(); }

void parallel_chunks(std::size_t count, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  if (count == 0) return;
  if (chunk == 0) chunk = count;
  const auto chunks = static_cast<long long>(chunk_count(count, chunk));
  if (chunks == 1 || omp_in_parallel() || omp_get_max_threads() == 1) {
    for (long long c = 0; c < chunks; ++c) {
      const std::size_t begin = static_cast<std::size_t>(c) * chunk;
      fn(begin, std::min(count, begin + chunk));
    }
    return;
  }
  // Exceptions must not escape the parallel region; the first one is
  // rethrown on the calling thread.
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < chunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * chunk;
    try {
      fn(begin, std::min(count, begin + chunk));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace methane
