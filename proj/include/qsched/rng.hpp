#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace qsched {

// Every random draw in the library comes from a std::mt19937_64 engine whose
// output sequence is fixed by the C++ standard. Each purpose gets its own
// stream, seeded with splitmix64(seed ^ tag), so streams never share state and
// adding draws to one purpose does not shift another.
//
// Draw mappings (also fixed, no std:: distributions involved):
//   uniform01      u = (x >> 11) * 2^-53, in [0, 1)
//   uniform_index  floor(u * n)
//   exponential    -log1p(-u) / rate

enum class Stream : std::uint64_t {
  Exploration = 0x6578706c6f726521ULL,
  Replay = 0x7265706c61792121ULL,
  Workload = 0x776f726b6c6f6164ULL,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, Stream stream) {
  return splitmix64(seed ^ static_cast<std::uint64_t>(stream));
}

class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream) : engine_(stream_seed(seed, stream)) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t uniform_index(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qsched
