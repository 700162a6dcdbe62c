#pragma once

#include <cstdint>

// Deterministic, splittable random streams.  A stream is keyed by
// (seed, stream_id) so that e.g. simulation replicate i always consumes the
// same draws regardless of how replicates are distributed over threads.
// Engine: xoshiro256++ seeded through a splitmix64 chain; variates are
// produced by inverse-CDF transforms only, so sequences are identical across
// platforms and standard-library versions.

namespace winstat {

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1); safe to feed into inverse CDFs.
  double uniform01();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi);

  // Exponential with the given rate.
  double exponential(double rate);

  // Standard normal via the AS241 inverse CDF.
  double normal();

 private:
  std::uint64_t s_[4];
};

}  // namespace winstat
