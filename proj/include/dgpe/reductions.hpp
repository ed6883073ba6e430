#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace dgpe {

// Deterministic reductions.  Every published scalar is produced by a fixed
// pairwise summation tree over fixed-size chunks, so the result does not
// depend on the number of OpenMP threads (chunks are computed in parallel but
// combined in index order).

namespace detail {

constexpr std::size_t kChunk = 1024;

template <class T>
T pairwise(const T* x, std::size_t n) {
  if (n == 0) return T{};
  if (n <= 8) {
    T s = x[0];
    for (std::size_t i = 1; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise(x, half) + pairwise(x + half, n - half);
}

}  // namespace detail

// Sum of f(i) for i in [0, n); f must be pure (no side effects).
template <class F>
double det_sum(std::size_t n, F&& f) {
  using detail::kChunk;
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < std::ptrdiff_t(nchunks); ++c) {
    double buf[detail::kChunk];
    const std::size_t lo = std::size_t(c) * kChunk;
    const std::size_t hi = lo + kChunk < n ? lo + kChunk : n;
    for (std::size_t i = lo; i < hi; ++i) buf[i - lo] = f(i);
    partial[c] = detail::pairwise(buf, hi - lo);
  }
  return detail::pairwise(partial.data(), nchunks);
}

template <class F>
std::complex<double> det_sum_complex(std::size_t n, F&& f) {
  using detail::kChunk;
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<std::complex<double>> partial(nchunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < std::ptrdiff_t(nchunks); ++c) {
    std::complex<double> buf[detail::kChunk];
    const std::size_t lo = std::size_t(c) * kChunk;
    const std::size_t hi = lo + kChunk < n ? lo + kChunk : n;
    for (std::size_t i = lo; i < hi; ++i) buf[i - lo] = f(i);
    partial[c] = detail::pairwise(buf, hi - lo);
  }
  return detail::pairwise(partial.data(), nchunks);
}

// Max of f(i); deterministic trivially (max is associative-commutative exact).
template <class F>
double det_max(std::size_t n, F&& f) {
  using detail::kChunk;
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < std::ptrdiff_t(nchunks); ++c) {
    const std::size_t lo = std::size_t(c) * kChunk;
    const std::size_t hi = lo + kChunk < n ? lo + kChunk : n;
    double m = f(lo);
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double v = f(i);
      if (v > m) m = v;
    }
    partial[c] = m;
  }
  double m = partial[0];
  for (std::size_t c = 1; c < nchunks; ++c)
    if (partial[c] > m) m = partial[c];
  return m;
}

}  // namespace dgpe
