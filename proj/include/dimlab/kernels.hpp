#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace dimlab::kernels {

// Worker count resolution: explicit argument > DIMLAB_WORKERS env > OpenMP max.
int default_workers();
int resolve_workers(int requested);

// All kernels come in a serial reference version and an OpenMP version.
// Both must produce bit-identical results for any worker count: integer
// reductions are exact, float reductions are max-only, and per-index fills
// write disjoint slots.

template <class Pred>
std::uint64_t count_true_serial(std::int64_t n, Pred&& pred) {
  std::uint64_t c = 0;
  for (std::int64_t i = 0; i < n; ++i) c += pred(i) ? 1u : 0u;
  return c;
}

template <class Pred>
std::uint64_t count_true(std::int64_t n, int workers, Pred&& pred) {
  workers = resolve_workers(workers);
  if (workers <= 1) return count_true_serial(n, pred);
  std::uint64_t c = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers) reduction(+ : c)
#endif
  for (std::int64_t i = 0; i < n; ++i) c += pred(i) ? 1u : 0u;
  return c;
}

template <class Fn>
double max_value_serial(std::int64_t n, Fn&& fn) {
  double best = -1e308;
  for (std::int64_t i = 0; i < n; ++i) best = std::max(best, fn(i));
  return best;
}

template <class Fn>
double max_value(std::int64_t n, int workers, Fn&& fn) {
  workers = resolve_workers(workers);
  if (workers <= 1) return max_value_serial(n, fn);
  double best = -1e308;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers) reduction(max : best)
#endif
  for (std::int64_t i = 0; i < n; ++i) best = std::max(best, fn(i));
  return best;
}

template <class Fn>
double min_value_serial(std::int64_t n, Fn&& fn) {
  double best = 1e308;
  for (std::int64_t i = 0; i < n; ++i) best = std::min(best, fn(i));
  return best;
}

template <class Fn>
double min_value(std::int64_t n, int workers, Fn&& fn) {
  workers = resolve_workers(workers);
  if (workers <= 1) return min_value_serial(n, fn);
  double best = 1e308;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers) reduction(min : best)
#endif
  for (std::int64_t i = 0; i < n; ++i) best = std::min(best, fn(i));
  return best;
}

// Parallel fill; the caller reduces serially so float sums stay ordered.
template <class Fn>
void fill_serial(std::int64_t n, double* out, Fn&& fn) {
  for (std::int64_t i = 0; i < n; ++i) out[i] = fn(i);
}

template <class Fn>
void fill(std::int64_t n, int workers, double* out, Fn&& fn) {
  workers = resolve_workers(workers);
  if (workers <= 1) {
    fill_serial(n, out, fn);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers)
#endif
  for (std::int64_t i = 0; i < n; ++i) out[i] = fn(i);
}

template <class Fn>
std::vector<double> fill_vector(std::int64_t n, int workers, Fn&& fn) {
  std::vector<double> out(static_cast<std::size_t>(n));
  fill(n, workers, out.data(), fn);
  return out;
}

// Bit-packed grid of predicate values, filled in parallel by 64-cell words.
template <class Pred>
std::vector<std::uint64_t> fill_bits(std::int64_t n, int workers, Pred&& pred) {
  const std::int64_t words = (n + 63) / 64;
  std::vector<std::uint64_t> bits(static_cast<std::size_t>(words), 0);
  workers = resolve_workers(workers);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers) if (workers > 1)
#endif
  for (std::int64_t w = 0; w < words; ++w) {
    std::uint64_t word = 0;
    const std::int64_t base = w * 64;
    const std::int64_t hi = std::min<std::int64_t>(64, n - base);
    for (std::int64_t b = 0; b < hi; ++b)
      if (pred(base + b)) word |= (1ull << b);
    bits[static_cast<std::size_t>(w)] = word;
  }
  return bits;
}

inline bool get_bit(const std::vector<std::uint64_t>& bits, std::int64_t i) {
  return (bits[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1u;
}

}  // namespace dimlab::kernels
