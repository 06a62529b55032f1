#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sotdd {

namespace detail {

// splitmix64 finalizer; mixes a 64-bit state into a well-distributed output.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// A value-type random stream. Wraps std::mt19937_64 (whose output sequence is
// fully specified by the standard, so results are reproducible across
// platforms) and derives all floating-point draws from explicit bit
// manipulation rather than distribution objects.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double next_unit_open_low() { return 1.0 - next_unit(); }

  // Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double next_gaussian() {
    const double u1 = next_unit_open_low();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Uniform integer in {1, ..., n}, n >= 1.
  std::uint64_t next_index1(std::uint64_t n) {
    const std::uint64_t k = 1 + static_cast<std::uint64_t>(next_unit() * static_cast<double>(n));
    return k > n ? n : k;
  }

 private:
  std::mt19937_64 engine_;
};

// Deterministic derivation of independent streams from one master seed.
// Stream l is a pure function of (master, l): safe to materialize on any
// worker, in any order, on any machine.
class SeedSchedule {
 public:
  explicit SeedSchedule(std::uint64_t master) : master_(master) {}

  std::uint64_t master() const { return master_; }

  std::uint64_t stream_seed(std::uint64_t index) const {
    return detail::splitmix64(detail::splitmix64(master_) + 0x9e3779b97f4a7c15ULL * (index + 1));
  }

  RngStream stream(std::uint64_t index) const { return RngStream(stream_seed(index)); }

  // An extra family of streams that never collides with stream(l); used for
  // held-out references and repeat seeds in experiments.
  SeedSchedule derived(std::uint64_t tag) const {
    return SeedSchedule(detail::splitmix64(master_ ^ (0xd1b54a32d192ed03ULL * (tag + 1))));
  }

 private:
  std::uint64_t master_;
};

}  // namespace sotdd
