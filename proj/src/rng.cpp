#include "spinreduce/rng.hpp"

#include <cmath>
#include <numbers>

namespace spinreduce {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0,
                         std::uint32_t k1) {
    const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
    const auto hi0 = std::uint32_t(p0 >> 32);
    const auto lo0 = std::uint32_t(p0);
    const auto hi1 = std::uint32_t(p1 >> 32);
    const auto lo1 = std::uint32_t(p1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
}

inline double to_double53(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (std::uint64_t(hi) << 32) | lo;
    return double(bits >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint64_t stream,
                                        std::uint64_t block) {
    std::array<std::uint32_t, 4> ctr = {
        std::uint32_t(block), std::uint32_t(block >> 32),
        std::uint32_t(stream), std::uint32_t(stream >> 32)};
    std::uint32_t k0 = std::uint32_t(seed);
    std::uint32_t k1 = std::uint32_t(seed >> 32);
    for (int round = 0; round < 10; ++round) {
        philox_round(ctr, k0, k1);
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return ctr;
}

std::array<std::uint32_t, 4> CounterRng::next_block() {
    return philox4x32(seed_, stream_, block_++);
}

double CounterRng::uniform01() {
    const auto w = next_block();
    return to_double53(w[0], w[1]);
}

double CounterRng::normal() {
    const auto w = next_block();
    const double u1 = to_double53(w[0], w[1]);
    const double u2 = to_double53(w[2], w[3]);
    // 1 - u1 lies in (0, 1], so the log is finite.
    return std::sqrt(-2.0 * std::log(1.0 - u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
    const auto w = philox4x32(master_seed, index, 0);
    return (std::uint64_t(w[0]) << 32) | w[1];
}

}  // namespace spinreduce
