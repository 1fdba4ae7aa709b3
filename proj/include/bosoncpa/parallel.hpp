#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bosoncpa {

/// Serial runs are the reference path; parallel runs must reproduce them
/// bit for bit.
enum class Execution { kSerial, kParallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

namespace detail {

inline constexpr std::size_t kSumChunk = 256;

template <class T, class F>
T pairwise_range(std::size_t lo, std::size_t hi, const F& f) {
  if (hi - lo <= 8) {
    T s = f(lo);
    for (std::size_t i = lo + 1; i < hi; ++i) s = s + f(i);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_range<T>(lo, mid, f) + pairwise_range<T>(mid, hi, f);
}

}  // namespace detail

/// Sum of f(0) + ... + f(n-1) with a fixed pairwise tree: fixed-size chunks
/// are reduced pairwise, then the chunk sums are reduced pairwise. The tree
/// does not depend on the thread count, so results are bit-identical across
/// Execution modes and OMP_NUM_THREADS. Exceptions thrown by f are
/// rethrown on the calling thread.
template <class T, class F>
T deterministic_sum(std::size_t n, const F& f, Execution exec) {
  if (n == 0) return T{};
  const std::size_t chunks = (n + detail::kSumChunk - 1) / detail::kSumChunk;
  std::vector<T> partial(chunks);
  auto chunk = [&](std::size_t c) {
    const std::size_t lo = c * detail::kSumChunk;
    const std::size_t hi = std::min(n, lo + detail::kSumChunk);
    partial[c] = detail::pairwise_range<T>(lo, hi, f);
  };

  if (exec == Execution::kParallel && chunks > 1) {
    std::exception_ptr error;
    std::mutex error_mutex;
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(chunks); ++c) {
      try {
        chunk(static_cast<std::size_t>(c));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (std::size_t c = 0; c < chunks; ++c) chunk(c);
  }
  return detail::pairwise_range<T>(
      0, chunks, [&](std::size_t i) -> const T& { return partial[i]; });
}

}  // namespace bosoncpa
