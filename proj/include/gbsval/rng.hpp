#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace gbsval::rng {

// Stream labels. Every random draw in the library flows from one master seed
// through one of these labels, so streams never overlap.
inline constexpr std::string_view kAmplitudes = "amplitudes";
inline constexpr std::string_view kBernoulli = "bernoulli";
inline constexpr std::string_view kPermutation = "permutation";
inline constexpr std::string_view kMultinomial = "multinomial";

std::uint64_t splitmix64(std::uint64_t x);

// Key for a labelled stream derived from a master seed.
std::uint64_t stream_key(std::uint64_t master_seed, std::string_view label);

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Stateless counter-based generator. A draw is a pure function of
// (key, a, b), so results do not depend on evaluation order or thread count.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t key() const { return key_; }

    // Two independent uniforms in the open interval (0, 1).
    std::pair<double, double> uniform_pair(std::uint64_t a, std::uint64_t b) const;

    double uniform(std::uint64_t a, std::uint64_t b) const { return uniform_pair(a, b).first; }

    // Two independent standard normals (Box-Muller on uniform_pair).
    std::pair<double, double> normal_pair(std::uint64_t a, std::uint64_t b) const;

    std::uint64_t bits(std::uint64_t a, std::uint64_t b) const;

  private:
    std::uint64_t key_;
};

// Sequential engine over a CounterRng substream; satisfies
// UniformRandomBitGenerator for use with <random> distributions.
class StreamEngine {
  public:
    using result_type = std::uint64_t;

    StreamEngine(std::uint64_t key, std::uint64_t substream) : rng_(key), substream_(substream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() { return rng_.bits(substream_, counter_++); }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound);

    double uniform() { return rng_.uniform(substream_, counter_++); }

  private:
    CounterRng rng_;
    std::uint64_t substream_;
    std::uint64_t counter_ = 0;
};

// Uniform random permutation of {0..n-1} by Fisher-Yates, keyed by
// (seed, trial) on the permutation stream.
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed, std::uint64_t trial);

} // namespace gbsval::rng
