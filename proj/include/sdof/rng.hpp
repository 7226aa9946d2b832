#pragma once

#include <complex>
#include <cstdint>

namespace sdof {

/// Counter-based random source: the k-th draw of stream s under a seed is a
/// pure function of (seed, s, k), so any parallel schedule reproduces the
/// same values.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const;

  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const;

  /// Standard normal; consumes counters 2k and 2k+1.
  double normal(std::uint64_t k) const;

  /// Circularly-symmetric complex Gaussian with unit variance (E|z|^2 = 1).
  std::complex<double> complex_normal(std::uint64_t k) const;

  CounterRng substream(std::uint64_t s) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace sdof
