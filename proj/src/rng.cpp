#include "winstat/rng.hpp"

#include <cmath>

#include "winstat/normal.hpp"

namespace winstat {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
  // Mix seed and stream id into one splitmix key, then draw the four words of
  // xoshiro state from the splitmix sequence.  splitmix64 is a bijection, so
  // distinct (seed, stream) pairs give distinct keys and the state is never
  // all zero in practice; guard anyway.
  std::uint64_t key = seed;
  key ^= 0x9e3779b97f4a7c15ULL + stream_id + (key << 6) + (key >> 2);
  s_[0] = splitmix64(key);
  s_[1] = splitmix64(key);
  s_[2] = splitmix64(key);
  s_[3] = splitmix64(key);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t RngStream::next_u64() {
  // xoshiro256++ (Blackman & Vigna).
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform01() {
  // 53 random bits mapped to the open interval (0,1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double RngStream::exponential(double rate) { return -std::log(uniform01()) / rate; }

double RngStream::normal() { return norm_ppf(uniform01()); }

}  // namespace winstat
