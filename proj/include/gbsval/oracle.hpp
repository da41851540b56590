#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gbsval/gaussian_input.hpp"
#include "gbsval/lattice.hpp"
#include "gbsval/network.hpp"
#include "gbsval/observables.hpp"

namespace gbsval {

inline constexpr std::size_t kOracleModeCap = 12;

// Symmetrically ordered output quadrature covariance in vacuum units
// (x = a + a^dagger, vacuum variance 1), ordered (x_1..x_M, y_1..y_M).
struct OutputCovariance {
    Eigen::MatrixXd v;

    std::size_t modes() const { return static_cast<std::size_t>(v.rows() / 2); }

    // Williamson eigenvalues; all >= 1 for a physical state.
    Eigen::VectorXd symplectic_eigenvalues() const;
    // Throws NumericalError unless symmetric with symplectic eigenvalues >= 1 - 1e-9.
    void validate() const;

    // Variances of the sigma-ordered phase-space distribution: V + (2 sigma - 1) I.
    Eigen::MatrixXd ordered(double sigma) const;

    // Probability that every mode in `modes` is empty: det((V_S + I)/2)^{-1/2}.
    double vacuum_probability(std::span<const std::size_t> modes) const;
};

OutputCovariance vacuum_covariance(std::size_t modes);

// V_out = S (V_in - I) S^T + I with S = [[A, -B], [B, A]] for t * T = A + iB.
OutputCovariance output_covariance(const InputModel& model, const TransmissionMatrix& network);

struct ClickPair {
    double p0 = 1.0;
    double p1 = 0.0;
};

// One-mode model after amplitude transmission t: p0 = ((1+n)^2 - m^2)^{-1/2}.
ClickPair exact_click_prob_single_mode(const InputModel& model);

// Pattern bit i is mode i. Sums vacuum probabilities by inclusion-exclusion.
double exact_pattern_probability(const OutputCovariance& cov, std::span<const bool> pattern,
                                 std::size_t cap = kOracleModeCap);

// All 2^M pattern probabilities, indexed by click mask (bit i = mode i).
std::vector<double> exact_pattern_distribution(const OutputCovariance& cov, std::size_t cap = kOracleModeCap);

// Exact GCP with zero sampling error.
GcpEstimate exact_gcp(const OutputCovariance& cov, const BinningSpec& spec, std::size_t cap = kOracleModeCap);

// prod_{j in modes} t^2 n_j; the network must be the identity.
double exact_identity_correlation(const InputModel& model, const TransmissionMatrix& network,
                                  std::span<const std::size_t> modes);

} // namespace gbsval
