#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace fogsim {

// Algorithm name recorded in every run's metadata so traces can be replayed
// with the exact generator that produced them.
inline constexpr const char* kPrngAlgorithm = "xoshiro256++";

std::uint64_t splitmix64(std::uint64_t& state);

// FNV-1a, used for config hashes and for deriving per-entity RNG streams
// from stable string ids (independent of container iteration order).
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(const std::string& s);

// xoshiro256++ with splitmix64 seeding. Deterministic across platforms for a
// given seed; one instance per simulation run (single owner, no sharing).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform01();  // [0, 1)
  double exponential(double mean);

  // Derived independent stream (per robot, per workload stream, ...).
  Rng fork(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
};

}  // namespace fogsim
