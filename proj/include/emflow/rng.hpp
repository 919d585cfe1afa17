#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace emflow {

// Counter-based RNG (Philox4x32-10 style bijection). Streams are stateless:
// every draw is a pure function of (key, counter), so the parallel layout of
// paths cannot change the sample set and any draw can be replayed.
namespace philox {

inline constexpr uint32_t kMult0 = 0xD2511F53u;
inline constexpr uint32_t kMult1 = 0xCD9E8D57u;
inline constexpr uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr uint32_t kWeyl1 = 0xBB67AE85u;

struct Block {
  std::array<uint32_t, 4> x;
};

inline void round_once(std::array<uint32_t, 4>& c, uint32_t k0, uint32_t k1) {
  uint64_t p0 = uint64_t(kMult0) * c[0];
  uint64_t p1 = uint64_t(kMult1) * c[2];
  uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
  uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
  c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

inline Block generate(uint64_t key, uint64_t ctr_hi, uint64_t ctr_lo) {
  std::array<uint32_t, 4> c = {uint32_t(ctr_lo), uint32_t(ctr_lo >> 32),
                               uint32_t(ctr_hi), uint32_t(ctr_hi >> 32)};
  uint32_t k0 = uint32_t(key), k1 = uint32_t(key >> 32);
  for (int r = 0; r < 10; ++r) {
    round_once(c, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return Block{c};
}

}  // namespace philox

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stream key for one Monte Carlo path: mixes (global seed, Picard iteration,
// quadrature index, replicate index) so each iteration gets fresh,
// independent Brownian increments.
inline uint64_t stream_key(uint64_t seed, uint64_t iteration, uint64_t quad_index,
                           uint64_t replicate) {
  uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ (0x1000003ull * iteration + 1));
  k = splitmix64(k ^ (0x100000001b3ull * quad_index + 2));
  k = splitmix64(k ^ (0x9E3779B97F4A7C15ull * replicate + 3));
  return k;
}

class CounterRng {
 public:
  explicit CounterRng(uint64_t key) : key_(key) {}

  // uniform in (0,1), never exactly 0 or 1
  static double to_unit(uint64_t u) {
    return (double(u >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  // two uniforms from one block
  std::array<double, 2> uniforms(uint64_t ctr_hi, uint64_t ctr_lo) const {
    philox::Block b = philox::generate(key_, ctr_hi, ctr_lo);
    uint64_t u0 = (uint64_t(b.x[0]) << 32) | b.x[1];
    uint64_t u1 = (uint64_t(b.x[2]) << 32) | b.x[3];
    return {to_unit(u0), to_unit(u1)};
  }

  // Box-Muller pair
  std::array<double, 2> gaussian_pair(uint64_t ctr_hi, uint64_t ctr_lo) const {
    auto u = uniforms(ctr_hi, ctr_lo);
    double r = std::sqrt(-2.0 * std::log(u[0]));
    double a = 2.0 * M_PI * u[1];
    return {r * std::cos(a), r * std::sin(a)};
  }

  // k independent standard gaussians for time step `step` (k <= 4)
  template <int K>
  std::array<double, K> gaussians(uint64_t step) const {
    static_assert(K >= 1 && K <= 4);
    std::array<double, K> out{};
    auto g0 = gaussian_pair(step, 0);
    out[0] = g0[0];
    if constexpr (K >= 2) out[1] = g0[1];
    if constexpr (K >= 3) {
      auto g1 = gaussian_pair(step, 1);
      out[2] = g1[0];
      if constexpr (K >= 4) out[3] = g1[1];
    }
    return out;
  }

  uint64_t key() const { return key_; }

 private:
  uint64_t key_;
};

}  // namespace emflow
