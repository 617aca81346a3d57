#ifndef PREFMCTS_RNG_HPP
#define PREFMCTS_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace prefmcts {

/// One step of the splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a, used to turn labels (algorithm names etc.) into seed material.
constexpr std::uint64_t hash_label(std::string_view s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Order-sensitive combination of seed material into a single 64-bit seed.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept
{
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t p : parts)
        h = mix64(h ^ mix64(p));
    return h;
}

/**
 * Deterministic pseudo-random stream (xoshiro256**, seeded through splitmix64).
 *
 * All draws are defined here bit for bit, so a seed reproduces the same
 * sequence on every platform and standard library. The <random>
 * distributions are deliberately not used since their output is
 * implementation-defined.
 */
class RngStream
{
public:
    explicit RngStream(std::uint64_t seed = 0) noexcept
    {
        std::uint64_t x = seed;
        for (auto& s : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            s = z ^ (z >> 31);
        }
    }

    std::uint64_t next() noexcept
    {
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

    /// Uniform integer in [0, n). n must be positive.
    std::size_t index(std::size_t n) noexcept
    {
        // Lemire's multiply-shift with rejection; exact uniformity.
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::size_t>(m >> 64);
    }

    /// Fair coin.
    bool coin() noexcept { return (next() >> 63) != 0; }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Independent child stream; does not disturb this stream's sequence beyond one draw.
    RngStream split() noexcept { return RngStream(mix64(next())); }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
    {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace prefmcts

#endif  // PREFMCTS_RNG_HPP
