#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version. Parallel reductions split work into blocks whose layout
// depends only on the problem size, so results are independent of the
// thread count.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gbsval/lattice.hpp"
#include "gbsval/summation.hpp"

namespace gbsval::kernels {

void set_threads(int threads);
int max_threads();

// out = t * in; columns are trajectories.
void transform_serial(const Eigen::MatrixXcd& t, Eigen::Ref<const Eigen::MatrixXcd> in,
                      Eigen::Ref<Eigen::MatrixXcd> out);
void transform_parallel(const Eigen::MatrixXcd& t, Eigen::Ref<const Eigen::MatrixXcd> in,
                        Eigen::Ref<Eigen::MatrixXcd> out);

// Per-subset twiddle tables for the grouped-count Fourier observable.
class FourierPlan {
  public:
    explicit FourierPlan(const BinningSpec& spec);

    const Lattice& lattice() const { return lattice_; }
    const BinningSpec& spec() const { return spec_; }
    // exp(-i k theta_j) for k = 0..M_j.
    const std::vector<std::complex<double>>& twiddles(std::size_t axis) const { return twiddles_[axis]; }

    // Gt(k) for a single trajectory, written to `term` (size lattice().size()).
    // `vacuum` holds pi(0) per output mode of the trajectory.
    void trajectory_term(const std::complex<double>* vacuum, std::vector<std::complex<double>>& factors,
                         std::vector<std::complex<double>>& term) const;

  private:
    BinningSpec spec_;
    Lattice lattice_;
    std::vector<std::vector<std::complex<double>>> twiddles_;
};

// Adds Gt(k) of trajectories [begin, end) (columns of `vacuum`) to `acc`.
void accumulate_fourier_serial(const FourierPlan& plan, const Eigen::MatrixXcd& vacuum, Eigen::Index begin,
                               Eigen::Index end, CompensatedComplexVector& acc);
void accumulate_fourier_parallel(const FourierPlan& plan, const Eigen::MatrixXcd& vacuum, Eigen::Index begin,
                                 Eigen::Index end, CompensatedComplexVector& acc);

// Sum over trajectories [begin, end) of prod_i values(rows[i], k)^powers[i].
std::complex<double> product_sum_serial(const Eigen::MatrixXcd& values, std::span<const std::size_t> rows,
                                        std::span<const int> powers, Eigen::Index begin, Eigen::Index end);
std::complex<double> product_sum_parallel(const Eigen::MatrixXcd& values, std::span<const std::size_t> rows,
                                          std::span<const int> powers, Eigen::Index begin, Eigen::Index end);

// Packed patterns: `words_per_pattern` 64-bit words per sample, mode i at
// bit (i % 64) of word (i / 64). `masks` holds one word run per axis.
struct PatternView {
    std::span<const std::uint64_t> words;
    std::size_t words_per_pattern = 0;
    std::size_t samples = 0;
};

std::vector<std::uint64_t> histogram_serial(const PatternView& patterns, std::span<const std::uint64_t> masks,
                                            const Lattice& lattice);
std::vector<std::uint64_t> histogram_parallel(const PatternView& patterns, std::span<const std::uint64_t> masks,
                                              const Lattice& lattice);

} // namespace gbsval::kernels
