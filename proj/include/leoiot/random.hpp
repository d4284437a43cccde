#ifndef LEOIOT_RANDOM_HPP_
#define LEOIOT_RANDOM_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace leoiot {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream seed for (master seed, stream labels...).
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> labels)
{
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t label : labels)
        h = splitmix64(h ^ splitmix64(label + 0x632be59bd9b4e019ULL));
    return h;
}

inline Rng make_rng(std::uint64_t seed)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Rng(seq);
}

/// Uniform double in [0, 1) built from the top 53 bits, identical on every platform.
inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double exponential(Rng& rng, double rate)
{
    return -std::log1p(-uniform01(rng)) / rate;
}

/// Uniform integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n)
{
    return static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(n));
}

template <typename It>
void shuffle(It first, It last, Rng& rng)
{
    for (auto n = last - first; n > 1; --n) {
        auto j = static_cast<decltype(n)>(uniform_index(rng, static_cast<std::uint64_t>(n)));
        std::iter_swap(first + (n - 1), first + j);
    }
}

} // namespace leoiot

#endif // LEOIOT_RANDOM_HPP_
