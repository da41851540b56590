#include "gbsval/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace gbsval::rng {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t master_seed, std::string_view label)
{
    // FNV-1a over the label, then mixed with the seed.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(splitmix64(master_seed) ^ h);
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key)
{
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

namespace {

std::array<std::uint32_t, 4> block(std::uint64_t key, std::uint64_t a, std::uint64_t b)
{
    return philox4x32({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                       static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)},
                      {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)});
}

double to_open_unit(std::uint64_t x)
{
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace

std::pair<double, double> CounterRng::uniform_pair(std::uint64_t a, std::uint64_t b) const
{
    const auto r = block(key_, a, b);
    const std::uint64_t x0 = (std::uint64_t{r[0]} << 32) | r[1];
    const std::uint64_t x1 = (std::uint64_t{r[2]} << 32) | r[3];
    return {to_open_unit(x0), to_open_unit(x1)};
}

std::pair<double, double> CounterRng::normal_pair(std::uint64_t a, std::uint64_t b) const
{
    const auto [u1, u2] = uniform_pair(a, b);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::uint64_t CounterRng::bits(std::uint64_t a, std::uint64_t b) const
{
    const auto r = block(key_, a, b);
    return (std::uint64_t{r[0]} << 32) | r[1];
}

std::uint64_t StreamEngine::below(std::uint64_t bound)
{
    if (bound <= 1) {
        return 0;
    }
    // Reject the top partial bucket so every residue is equally likely.
    const std::uint64_t limit = max() - (max() % bound + 1) % bound;
    for (;;) {
        const std::uint64_t x = (*this)();
        if (x <= limit) {
            return x % bound;
        }
    }
}

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed, std::uint64_t trial)
{
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    StreamEngine engine(stream_key(seed, kPermutation), trial);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(engine.below(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

} // namespace gbsval::rng
