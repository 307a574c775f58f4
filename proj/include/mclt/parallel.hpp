#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace mclt {

/// Replications are always split into chunks of this many, independent of the
/// worker count, so per-chunk partial results have a fixed shape.
inline constexpr std::size_t kChunkSize = 2048;

inline std::size_t chunk_count(std::size_t total) {
  return (total + kChunkSize - 1) / kChunkSize;
}

/// Evaluates fn(begin, end) for every chunk of [0, total) on up to `workers`
/// threads and returns the partial results in chunk order. If any chunk
/// throws, the exception of the lowest-numbered failing chunk is rethrown.
template <class Fn>
auto map_chunks(std::size_t total, unsigned workers, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{}, std::size_t{}))> {
  using Part = decltype(fn(std::size_t{}, std::size_t{}));
  const std::size_t chunks = chunk_count(total);
  std::vector<Part> parts(chunks);
  std::vector<std::exception_ptr> errors(chunks);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      const std::size_t begin = c * kChunkSize;
      const std::size_t end = std::min(total, begin + kChunkSize);
      try {
        parts[c] = fn(begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };

  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), chunks));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return parts;
}

/// Pairwise reduction with a shape that depends only on parts.size().
template <class Part, class Merge>
Part tree_reduce(std::vector<Part> parts, Merge&& merge) {
  if (parts.empty()) return Part{};
  std::size_t width = parts.size();
  while (width > 1) {
    const std::size_t half = (width + 1) / 2;
    for (std::size_t i = 0; i + half < width; ++i)
      parts[i] = merge(std::move(parts[i]), std::move(parts[i + half]));
    width = half;
  }
  return std::move(parts.front());
}

}  // namespace mclt
