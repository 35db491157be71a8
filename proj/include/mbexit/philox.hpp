#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every variate
// is a pure function of (key, counter), so a path's random numbers do not
// depend on which thread simulates it or in what order.

#include <array>
#include <cmath>
#include <cstdint>

#include "mbexit/inverse_normal.hpp"

namespace mbexit {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
};

// Independent substreams of one path.
enum class Stream : std::uint32_t { increments = 0, bridge = 1, bessel = 2 };

// Variates of one simulated path: counter = (block, path lo, path hi, stream),
// key = seed. Each block yields two doubles.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          path_lo_(static_cast<std::uint32_t>(path)),
          path_hi_(static_cast<std::uint32_t>(path >> 32)) {}

    // Two uniforms in the open interval (0, 1): (k + 1/2) 2^-52, k < 2^52.
    std::array<double, 2> uniforms(Stream stream, std::uint32_t block) const noexcept {
        const auto w = Philox4x32::generate(
            {block, path_lo_, path_hi_, static_cast<std::uint32_t>(stream)}, key_);
        return {to_unit(w[0], w[1]), to_unit(w[2], w[3])};
    }

    // Two independent standard normals by inversion.
    std::array<double, 2> normals(Stream stream, std::uint32_t block) const noexcept {
        const auto u = uniforms(stream, block);
        return {inverse_normal_cdf(u[0]), inverse_normal_cdf(u[1])};
    }

private:
    static double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
        const std::uint64_t bits = (std::uint64_t{hi} << 32 | lo) >> 12;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
    }

    Philox4x32::Key key_;
    std::uint32_t path_lo_;
    std::uint32_t path_hi_;
};

}  // namespace mbexit
