#pragma once
#include <algorithm>
#include <cstddef>
#include <vector>

namespace cld::par {

// Iteration-space chunk used by the deterministic reductions. Partial sums
// are formed per chunk (serial within a chunk) and then combined by a fixed
// pairwise tree, so results do not depend on the number of threads.
inline constexpr std::size_t chunk_size = 2048;

namespace detail {
// Pairwise in-place tree reduction over the leading `len` entries.
inline double combine_tree(std::vector<double>& v, std::size_t len, std::size_t stride = 1) {
  while (len > 1) {
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < half; ++i)
      v[i * stride] = v[2 * i * stride] + v[(2 * i + 1) * stride];
    if (len & 1) {
      v[half * stride] = v[(len - 1) * stride];
      len = half + 1;
    } else {
      len = half;
    }
  }
  return len ? v[0] : 0.0;
}
} // namespace detail

/// Parallel loop over [0, n); the body must only write disjoint outputs.
template <class F>
void for_each(std::size_t n, F&& body) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    body(static_cast<std::size_t>(i));
}

/// Deterministic sum of term(i) over [0, n). Chunked pairwise reduction:
/// the result is bit-identical for any thread count.
template <class F>
double sum(std::size_t n, F&& term) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + chunk_size - 1) / chunk_size;
  std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
    const std::size_t b = static_cast<std::size_t>(c) * chunk_size;
    const std::size_t e = std::min(n, b + chunk_size);
    double acc = 0.0;
    for (std::size_t i = b; i < e; ++i) acc += term(i);
    partial[static_cast<std::size_t>(c)] = acc;
  }
  return detail::combine_tree(partial, nchunks);
}

/// Deterministic simultaneous sums: emit(i, out) accumulates `width` values
/// per index into out[0..width). Returns the per-slot totals.
template <class F>
std::vector<double> sum_vec(std::size_t n, std::size_t width, F&& emit) {
  std::vector<double> result(width, 0.0);
  if (n == 0 || width == 0) return result;
  const std::size_t nchunks = (n + chunk_size - 1) / chunk_size;
  std::vector<double> partial(nchunks * width, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
    const std::size_t b = static_cast<std::size_t>(c) * chunk_size;
    const std::size_t e = std::min(n, b + chunk_size);
    std::vector<double> acc(width, 0.0);
    for (std::size_t i = b; i < e; ++i) emit(i, acc.data());
    for (std::size_t w = 0; w < width; ++w)
      partial[static_cast<std::size_t>(c) + w * nchunks] = acc[w];
  }
  for (std::size_t w = 0; w < width; ++w) {
    std::vector<double> col(partial.begin() + static_cast<std::ptrdiff_t>(w * nchunks),
                            partial.begin() + static_cast<std::ptrdiff_t>((w + 1) * nchunks));
    result[w] = detail::combine_tree(col, nchunks);
  }
  return result;
}

} // namespace cld::par
