#pragma once

#include <cstdint>
#include <random>

#include "endring/arith.hpp"

namespace endring {

// Mixes a master seed with a stream key. Used for all per-task streams so
// a run with N worker threads draws exactly the same numbers as a serial run.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t key);
std::uint64_t split_seed(std::uint64_t master, std::uint64_t key1, std::uint64_t key2);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed), seed_(seed) {}

  std::uint64_t next() { return gen_(); }
  std::uint64_t seed() const { return seed_; }
  // Uniform in [0, n), n > 0. Rejection sampling, so the stream is
  // identical across standard libraries.
  std::uint64_t below(std::uint64_t n);
  Int below(const Int& n);
  Int range(const Int& lo, const Int& hi);  // inclusive
  bool coin() { return next() >> 63; }
  // Child stream keyed by counter; does not advance this stream.
  Rng split(std::uint64_t key) const { return Rng(split_seed(seed_, key)); }

 private:
  std::mt19937_64 gen_;
  std::uint64_t seed_;
};

}  // namespace endring
