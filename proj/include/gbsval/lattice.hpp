#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace gbsval {

// Disjoint output-mode subsets S_1..S_d defining a grouped count.
struct BinningSpec {
    std::vector<std::vector<std::size_t>> subsets;

    std::size_t dimension() const { return subsets.size(); }
    // Correlation order n = sum of subset sizes.
    std::size_t order() const;
    // Axis j has M_j + 1 grouped-count values.
    std::vector<std::size_t> extents() const;

    // Throws ConfigError for empty, overlapping or out-of-range subsets.
    void validate(std::size_t modes) const;

    // All modes in one group (total counts).
    static BinningSpec total(std::size_t modes);
    // d consecutive groups of M/d modes; requires d | M.
    static BinningSpec equal_split(std::size_t modes, std::size_t d);
};

// Row-major (m_1 slowest, m_d fastest) indexing of a grouped-count lattice.
class Lattice {
  public:
    Lattice() = default;
    explicit Lattice(std::vector<std::size_t> extents);

    const std::vector<std::size_t>& extents() const { return extents_; }
    std::size_t dimension() const { return extents_.size(); }
    std::size_t size() const { return size_; }
    std::size_t stride(std::size_t axis) const { return strides_[axis]; }

    std::size_t index(std::span<const std::size_t> coords) const;
    std::vector<std::size_t> coords(std::size_t index) const;

    bool operator==(const Lattice& other) const { return extents_ == other.extents_; }

  private:
    std::vector<std::size_t> extents_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 1;
};

// G(m) = (1/K) sum_k Gt(k) exp(+i sum_j k_j theta_j m_j), theta_j = 2 pi / extent_j.
std::vector<std::complex<double>> inverse_dft(const Lattice& lattice, std::span<const std::complex<double>> fourier);
// Gt(k) = sum_m G(m) exp(-i sum_j k_j theta_j m_j).
std::vector<std::complex<double>> forward_dft(const Lattice& lattice, std::span<const std::complex<double>> values);

std::uint64_t bin_count(const BinningSpec& spec);

// Distinct ways of splitting M modes into d equal groups: binom(M, M/d) / d.
boost::multiprecision::cpp_int permutation_count(std::size_t modes, std::size_t d);

} // namespace gbsval
