#include "jumpgop/rng.hpp"

#include <cmath>
#include <numbers>

namespace jumpgop::rng {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<uint32_t, 4>& c, const std::array<uint32_t, 2>& k) {
    const uint64_t p0 = uint64_t(kMul0) * c[0];
    const uint64_t p1 = uint64_t(kMul1) * c[2];
    const uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
    const uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<uint32_t, 4> philox4x32_10(const std::array<uint32_t, 4>& counter,
                                      const std::array<uint32_t, 2>& key) {
    auto c = counter;
    auto k = key;
    for (int r = 0; r < 10; ++r) {
        philox_round(c, k);
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

Stream::Stream(uint64_t seed, uint64_t sequence, uint32_t substream)
    : key_{uint32_t(seed), uint32_t(seed >> 32)},
      counter_{0u, substream, uint32_t(sequence), uint32_t(sequence >> 32)} {}

void Stream::refill() {
    buffer_ = philox4x32_10(counter_, key_);
    ++counter_[0];  // 2^32 blocks per substream
    buffer_pos_ = 0;
}

uint32_t Stream::next_u32() {
    if (buffer_pos_ >= 4) refill();
    return buffer_[buffer_pos_++];
}

uint64_t Stream::next_u64() {
    const uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
}

double Stream::uniform01() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::normal() {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_normal_ = true;
    return radius * std::cos(angle);
}

double Stream::exponential() {
    return -std::log(1.0 - uniform01());
}

}  // namespace jumpgop::rng
