#pragma once

#include <array>
#include <cstdint>

namespace spinreduce {

/// Counter-based pseudorandom generator (10-round Philox-4x32).
///
/// The block function is a pure mapping of (seed, stream, block index), so
/// every (seed, stream) pair names an independent random stream, any draw can
/// be regenerated in isolation, and identical inputs give identical 32-bit
/// outputs on every platform. Block layout:
///
///   counter words = (block_lo, block_hi, stream_lo, stream_hi)
///   key words     = (seed_lo, seed_hi)
///
/// Variate transforms are fixed so that noise sequences are part of the
/// reproducibility contract:
///
///   uniform01: one block per draw; words (w0, w1) form a 53-bit mantissa,
///              u = ((w0 << 32 | w1) >> 11) * 2^-53, giving u in [0, 1).
///   normal:    one block per draw; u1 from (w0, w1), u2 from (w2, w3),
///              z = sqrt(-2 ln(1 - u1)) * cos(2 pi u2).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    std::array<std::uint32_t, 4> next_block();
    double uniform01();
    double normal();

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
};

/// The Philox block for an explicit (seed, stream, block) triple.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint64_t stream,
                                        std::uint64_t block);

/// Seed of ensemble member `index` under `master_seed`: the first 64 bits of
/// block 0 of the (master_seed, index) stream.
std::uint64_t derive_trajectory_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace spinreduce
