// rng.hpp — counter-based normal deviates and deterministic Monte Carlo
// reduction.
//
// A NormalStream is keyed by (seed, stream). Sample i of a batch always uses
// stream i, so any partition of the index range across workers reproduces the
// sequential batch bit for bit.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

namespace pcsft {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

/// 64-bit FNV-1a over raw bytes, continuing from `hash`.
inline std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t hash = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) hash = (hash ^ p[i]) * 0x100000001b3ULL;
  return hash;
}

class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double next_uniform();
  /// Standard normal via Box-Muller; values are produced in pairs.
  double next_normal();
  void fill_normal(std::span<double> out);

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Streaming mean/variance accumulator (Welford); merge() is Chan's update.
struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const Moments& other);
  double variance() const;  // unbiased
  double standard_error() const;
};

/// Merges per-chunk moments in a fixed pairwise tree over chunk index, so the
/// result does not depend on how chunks were scheduled.
Moments pairwise_merge(std::span<const Moments> parts);

inline constexpr std::size_t kChunkSize = 4096;

/// Runs fn(chunk_index, begin, end) over [0, count) in kChunkSize chunks.
/// Chunks are statically assigned round-robin to `workers` threads.
template <class Fn>
void for_each_chunk(std::size_t count, unsigned workers, Fn&& fn) {
  const std::size_t chunks = (count + kChunkSize - 1) / kChunkSize;
  auto body = [&](unsigned w, unsigned stride) {
    for (std::size_t c = w; c < chunks; c += stride) {
      fn(c, c * kChunkSize, std::min(count, (c + 1) * kChunkSize));
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(chunks, 1))));
  if (workers == 1) {
    body(0, 1);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body, w, workers);
  for (auto& t : pool) t.join();
}

inline std::size_t chunk_count(std::size_t count) { return (count + kChunkSize - 1) / kChunkSize; }

}  // namespace pcsft
