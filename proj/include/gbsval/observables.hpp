#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gbsval/gaussian_input.hpp"
#include "gbsval/lattice.hpp"

namespace gbsval {

// Re(n') below this is clamped before exponentiation.
inline constexpr double kExponentFloor = -700.0;

inline constexpr std::size_t kDefaultRepeats = 16;

struct Estimate {
    double mean = 0.0;
    double error = 0.0; // sigma_T from repeat scatter; NaN with a single repeat
};

// Mean over repeats and sigma_T = sqrt(sum (G_i - G)^2 / (N_R (N_R - 1))).
Estimate repeat_statistics(std::span<const double> repeat_means);

// Output photon numbers n' = alpha' beta' - sigma (complex for positive-P trajectories).
Eigen::MatrixXcd output_photon_numbers(const AmplitudeEnsemble& ens);

struct ClickWeights {
    Eigen::MatrixXcd vacuum; // pi(0) = exp(-n'), modes x trajectories
    std::size_t clamped = 0; // entries whose Re(n') hit kExponentFloor

    std::complex<double> click(Eigen::Index mode, Eigen::Index trajectory) const
    {
        return 1.0 - vacuum(mode, trajectory);
    }
    Eigen::MatrixXcd clicks() const;
};

ClickWeights click_probabilities(const AmplitudeEnsemble& ens);

struct GcpEstimate {
    Lattice lattice;
    std::vector<double> values; // mean over repeats
    std::vector<double> errors; // sigma_T per bin
    std::vector<std::complex<double>> fourier; // ensemble-mean Fourier observable Gt(k)
    std::size_t n_r = 0;
    std::size_t clamped = 0;

    double total() const;
};

// Builds the estimate from per-repeat mean Fourier observables.
GcpEstimate finalize_gcp(const Lattice& lattice, const std::vector<std::vector<std::complex<double>>>& repeat_fourier,
                         std::size_t clamped);

GcpEstimate gcp(const AmplitudeEnsemble& ens, const BinningSpec& spec);

// <prod_j (n'_j)^{c_j}>; orders has one entry per mode.
Estimate intensity_correlation(const AmplitudeEnsemble& ens, std::span<const int> orders);
void validate_orders(std::span<const int> orders, std::size_t modes, Ordering ordering);

// <prod_{j in modes} pi_j(1)>.
Estimate marginal_moment(const AmplitudeEnsemble& ens, std::span<const std::size_t> modes);
void validate_distinct_modes(std::span<const std::size_t> modes, std::size_t count);

struct Cumulants {
    Estimate kappa1; // <pi_j(1)>
    Estimate kappa2; // <pi_j(1) pi_k(1)> - <pi_j(1)><pi_k(1)>
};

Cumulants cumulants_low_order(const AmplitudeEnsemble& ens, std::size_t j, std::size_t k);

// Builds the cumulant estimate from per-repeat means of pi_j, pi_k and pi_j pi_k.
Cumulants finalize_cumulants(std::span<const std::complex<double>> mean_j, std::span<const std::complex<double>> mean_k,
                             std::span<const std::complex<double>> mean_jk);

// CSV: header `m1,...,md,value,error`, one row per lattice point in row-major order.
void write_gcp_csv(std::ostream& out, const GcpEstimate& estimate);
GcpEstimate read_gcp_csv(std::istream& in);

} // namespace gbsval
