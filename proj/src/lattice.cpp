#include "gbsval/lattice.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gbsval/errors.hpp"

namespace gbsval {

std::size_t BinningSpec::order() const
{
    std::size_t n = 0;
    for (const auto& s : subsets) {
        n += s.size();
    }
    return n;
}

std::vector<std::size_t> BinningSpec::extents() const
{
    std::vector<std::size_t> e;
    e.reserve(subsets.size());
    for (const auto& s : subsets) {
        e.push_back(s.size() + 1);
    }
    return e;
}

void BinningSpec::validate(std::size_t modes) const
{
    if (subsets.empty()) {
        throw ConfigError("binning needs at least one subset");
    }
    std::vector<bool> used(modes, false);
    for (std::size_t j = 0; j < subsets.size(); ++j) {
        if (subsets[j].empty()) {
            throw ConfigError("binning subset " + std::to_string(j + 1) + " is empty");
        }
        for (std::size_t mode : subsets[j]) {
            if (mode >= modes) {
                throw ConfigError("binning subset " + std::to_string(j + 1) + " references mode " +
                                  std::to_string(mode) + " but only " + std::to_string(modes) +
                                  " modes exist");
            }
            if (used[mode]) {
                throw ConfigError("binning subsets overlap at mode " + std::to_string(mode));
            }
            used[mode] = true;
        }
    }
}

BinningSpec BinningSpec::total(std::size_t modes)
{
    return equal_split(modes, 1);
}

BinningSpec BinningSpec::equal_split(std::size_t modes, std::size_t d)
{
    if (d == 0 || modes == 0 || modes % d != 0) {
        throw ConfigError("equal split needs d to divide the mode count (M = " + std::to_string(modes) +
                          ", d = " + std::to_string(d) + ")");
    }
    BinningSpec spec;
    const std::size_t width = modes / d;
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<std::size_t> s(width);
        for (std::size_t i = 0; i < width; ++i) {
            s[i] = j * width + i;
        }
        spec.subsets.push_back(std::move(s));
    }
    return spec;
}

Lattice::Lattice(std::vector<std::size_t> extents) : extents_(std::move(extents)), strides_(extents_.size())
{
    size_ = 1;
    for (std::size_t a = extents_.size(); a-- > 0;) {
        strides_[a] = size_;
        if (extents_[a] == 0) {
            throw ConfigError("lattice axis has zero extent");
        }
        size_ *= extents_[a];
    }
}

std::size_t Lattice::index(std::span<const std::size_t> coords) const
{
    std::size_t idx = 0;
    for (std::size_t a = 0; a < extents_.size(); ++a) {
        idx += coords[a] * strides_[a];
    }
    return idx;
}

std::vector<std::size_t> Lattice::coords(std::size_t index) const
{
    std::vector<std::size_t> c(extents_.size());
    for (std::size_t a = 0; a < extents_.size(); ++a) {
        c[a] = index / strides_[a];
        index %= strides_[a];
    }
    return c;
}

namespace {

// Separable transform along every axis with kernel exp(sign * i * 2pi k m / L).
std::vector<std::complex<double>> separable_dft(const Lattice& lattice, std::span<const std::complex<double>> in,
                                                double sign)
{
    std::vector<std::complex<double>> data(in.begin(), in.end());
    std::vector<std::complex<double>> line;
    for (std::size_t axis = 0; axis < lattice.dimension(); ++axis) {
        const std::size_t len = lattice.extents()[axis];
        const std::size_t stride = lattice.stride(axis);
        std::vector<std::complex<double>> twiddle(len);
        for (std::size_t q = 0; q < len; ++q) {
            const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(len);
            twiddle[q] = {std::cos(angle), std::sin(angle)};
        }
        line.resize(len);
        const std::size_t outer = lattice.size() / (len * stride);
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t s = 0; s < stride; ++s) {
                const std::size_t base = o * len * stride + s;
                for (std::size_t out = 0; out < len; ++out) {
                    std::complex<double> acc = 0.0;
                    for (std::size_t q = 0; q < len; ++q) {
                        acc += data[base + q * stride] * twiddle[(out * q) % len];
                    }
                    line[out] = acc;
                }
                for (std::size_t q = 0; q < len; ++q) {
                    data[base + q * stride] = line[q];
                }
            }
        }
    }
    return data;
}

} // namespace

std::vector<std::complex<double>> inverse_dft(const Lattice& lattice, std::span<const std::complex<double>> fourier)
{
    if (fourier.size() != lattice.size()) {
        throw DataError("inverse DFT input does not match the lattice size");
    }
    auto out = separable_dft(lattice, fourier, +1.0);
    const double scale = 1.0 / static_cast<double>(lattice.size());
    for (auto& z : out) {
        z *= scale;
    }
    return out;
}

std::vector<std::complex<double>> forward_dft(const Lattice& lattice, std::span<const std::complex<double>> values)
{
    if (values.size() != lattice.size()) {
        throw DataError("forward DFT input does not match the lattice size");
    }
    return separable_dft(lattice, values, -1.0);
}

std::uint64_t bin_count(const BinningSpec& spec)
{
    std::uint64_t total = 1;
    for (std::size_t e : spec.extents()) {
        if (total > std::numeric_limits<std::uint64_t>::max() / e) {
            throw ConfigError("bin count overflows 64 bits");
        }
        total *= e;
    }
    return total;
}

boost::multiprecision::cpp_int permutation_count(std::size_t modes, std::size_t d)
{
    if (d == 0 || modes == 0 || modes % d != 0) {
        throw ConfigError("permutation count needs d to divide M");
    }
    // binom(M, M/d) / d == binom(M - 1, M/d - 1).
    const std::size_t n = modes - 1;
    const std::size_t k = modes / d - 1;
    boost::multiprecision::cpp_int result = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

} // namespace gbsval
