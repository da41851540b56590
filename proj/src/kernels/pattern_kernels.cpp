#include <bit>

#include <omp.h>

#include "gbsval/kernels.hpp"

namespace gbsval::kernels {

namespace {

std::size_t bin_of(const std::uint64_t* pattern, std::size_t words, std::span<const std::uint64_t> masks,
                   const Lattice& lattice)
{
    std::size_t idx = 0;
    for (std::size_t axis = 0; axis < lattice.dimension(); ++axis) {
        const std::uint64_t* mask = masks.data() + axis * words;
        std::size_t clicks = 0;
        for (std::size_t w = 0; w < words; ++w) {
            clicks += static_cast<std::size_t>(std::popcount(pattern[w] & mask[w]));
        }
        idx += clicks * lattice.stride(axis);
    }
    return idx;
}

} // namespace

std::vector<std::uint64_t> histogram_serial(const PatternView& patterns, std::span<const std::uint64_t> masks,
                                            const Lattice& lattice)
{
    std::vector<std::uint64_t> counts(lattice.size(), 0);
    for (std::size_t s = 0; s < patterns.samples; ++s) {
        const std::uint64_t* p = patterns.words.data() + s * patterns.words_per_pattern;
        ++counts[bin_of(p, patterns.words_per_pattern, masks, lattice)];
    }
    return counts;
}

std::vector<std::uint64_t> histogram_parallel(const PatternView& patterns, std::span<const std::uint64_t> masks,
                                              const Lattice& lattice)
{
    std::vector<std::uint64_t> counts(lattice.size(), 0);
    const auto samples = static_cast<long long>(patterns.samples);
#pragma omp parallel
    {
        std::vector<std::uint64_t> local(lattice.size(), 0);
#pragma omp for schedule(static) nowait
        for (long long s = 0; s < samples; ++s) {
            const std::uint64_t* p = patterns.words.data() + static_cast<std::size_t>(s) * patterns.words_per_pattern;
            ++local[bin_of(p, patterns.words_per_pattern, masks, lattice)];
        }
#pragma omp critical
        for (std::size_t i = 0; i < counts.size(); ++i) {
            counts[i] += local[i];
        }
    }
    return counts;
}

} // namespace gbsval::kernels
