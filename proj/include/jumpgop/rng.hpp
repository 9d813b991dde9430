#pragma once

#include <array>
#include <cstdint>

namespace jumpgop::rng {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Random
// numbers are a pure function of (key, counter), so any path / substream
// gets its own independent stream and parallel runs reproduce serial ones.
std::array<uint32_t, 4> philox4x32_10(const std::array<uint32_t, 4>& counter,
                                      const std::array<uint32_t, 2>& key);

// One logical stream = (seed, sequence, substream). `sequence` is the path
// (or antithetic-pair) index; `substream` separates the Brownian draw from
// each jump process so changing one never perturbs the others.
class Stream {
  public:
    Stream(uint64_t seed, uint64_t sequence, uint32_t substream);

    uint32_t next_u32();
    uint64_t next_u64();

    double uniform01();    // [0, 1), 53-bit resolution
    double normal();       // standard normal, Box-Muller
    double exponential();  // mean 1

  private:
    void refill();

    std::array<uint32_t, 2> key_;
    std::array<uint32_t, 4> counter_;
    std::array<uint32_t, 4> buffer_{};
    int buffer_pos_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_normal_ = false;
};

}  // namespace jumpgop::rng
