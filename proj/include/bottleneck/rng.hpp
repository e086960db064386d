#pragma once

#include <array>
#include <cstdint>

namespace bottleneck {

// splitmix64 step (Steele/Lea/Flood); used both to seed the main generator
// and to derive independent stream seeds from structured keys.
constexpr std::uint64_t split_mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Every random draw in a run is made from a stream keyed by
// (run seed, domain, timestep, edge). Loop order and thread count therefore
// never change the numbers a run produces.
enum class RngDomain : std::uint64_t {
    theta_draw = 1,    // prior draw of the hidden edge parameters
    context = 2,       // per-timestep context vectors
    noise = 3,         // observation noise on traversed edges
    ts_sample = 4,     // Thompson posterior samples
    eps_coin = 5,      // epsilon-greedy coin and random edge picks
    scenario_gen = 6,  // synthetic scenario generation
};

constexpr std::uint64_t derive_seed(std::uint64_t base, RngDomain domain,
                                    std::uint64_t t, std::uint64_t e) noexcept {
    std::uint64_t h = split_mix64(base);
    h = split_mix64(h ^ static_cast<std::uint64_t>(domain));
    h = split_mix64(h ^ t);
    h = split_mix64(h ^ e);
    return h;
}

// xoshiro256** (Blackman & Vigna), state filled from splitmix64.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0, 1): (2k+1) * 2^-53 for k in [0, 2^52), exactly
    // representable and symmetric about 1/2. Never returns 0 or 1, so it is
    // safe to feed through an inverse CDF.
    double next_uniform() noexcept {
        const std::uint64_t k = next_u64() >> 12;
        return (static_cast<double>(k) * 2.0 + 1.0) * 0x1.0p-53;
    }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t next_below(std::uint64_t n) noexcept {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    double next_uniform_range(double lo, double hi) noexcept {
        return lo + (hi - lo) * next_uniform();
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_;
};

}  // namespace bottleneck
