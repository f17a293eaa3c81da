#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qotl::par {

/// Fixed chunk width for deterministic reductions: partials are produced per
/// chunk and combined in index order, so results do not depend on the thread
/// count or schedule.
inline constexpr std::size_t kChunk = 4096;

int max_threads();
void set_max_threads(int n);

/// body(begin, end) over chunked [0, n); chunks may run on any thread.
template <class Body>
void for_chunks(std::size_t n, Body&& body) {
  const std::ptrdiff_t chunks = static_cast<std::ptrdiff_t>((n + kChunk - 1) / kChunk);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = begin + kChunk < n ? begin + kChunk : n;
    body(begin, end);
  }
}

/// Parallel loop over [0, n) with one index per iteration, static schedule.
template <class Body>
void for_each_index(std::ptrdiff_t n, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

/// Deterministic sum of f(i) over [0, n): chunk partials combined in order.
template <class F>
double sum_chunked(std::size_t n, F&& f) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = begin + kChunk < n ? begin + kChunk : n;
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += f(i);
    partial[static_cast<std::size_t>(c)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace qotl::par
