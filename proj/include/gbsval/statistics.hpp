#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gbsval/gaussian_input.hpp"
#include "gbsval/lattice.hpp"
#include "gbsval/network.hpp"
#include "gbsval/observables.hpp"

namespace gbsval {

// Integer counts on a grouped-count lattice.
struct BinnedCounts {
    Lattice lattice;
    std::vector<std::uint64_t> counts;
    std::uint64_t n_samples = 0;

    double probability(std::size_t bin) const
    {
        return n_samples ? static_cast<double>(counts[bin]) / static_cast<double>(n_samples) : 0.0;
    }
};

// A bin enters chi-square only when its observed count exceeds this.
inline constexpr std::uint64_t kValidBinThreshold = 10;
// Z above this has an extremely small probability of being observed.
inline constexpr double kExtremeZ = 6.0;
// Parameter resolution quoted for fitted (t, epsilon).
inline constexpr double kFitResolution = 0.0005;

struct BinComparison {
    std::size_t bin = 0;
    double theory = 0.0;
    double experiment = 0.0;
    double sigma_t = 0.0;
    double sigma_e = 0.0;
    std::uint64_t count = 0;
    bool valid = false;

    double sigma() const;
    // (theory - experiment) / sigma; positive when theory lies above.
    double normalized_difference() const;
};

struct ComparisonReport {
    double chi2 = 0.0;
    std::size_t k = 0;
    double chi2_over_k = 0.0;
    double z = 0.0;
    std::uint64_t n_samples = 0;
    std::vector<BinComparison> per_bin;

    bool z_reliable() const { return k >= 10; }
    bool extreme() const { return z > kExtremeZ; }
};

// Wilson-Hilferty Z = ((chi2/k)^{1/3} - (1 - 2/(9k))) / sqrt(2/(9k)).
double z_statistic(double chi2, std::size_t k);

// chi2 over the valid bins of `bins`, with k and Z.
ComparisonReport summarize_bins(std::vector<BinComparison> bins, std::uint64_t n_samples);

// sigma_i^2 = sigma_T^2 + theory / N_E; only bins with count > 10 contribute.
ComparisonReport chi_square(const GcpEstimate& theory, const BinnedCounts& counts);

struct NormalizedDifference {
    double value = 0.0; // (theory - experiment) / sigma
    double band = 0.0;  // sigma_T / sigma, the +-1 sigma_T reference line
};

double normalized_difference(double theory, double experiment, double sigma);
std::vector<NormalizedDifference> normalized_difference(const GcpEstimate& theory, const BinnedCounts& counts);

// CSV `bin,theory,experiment,sigma_T,sigma_E,norm_diff`, then `chi2,k,chi2_over_k,Z`
// and its value line.
void write_report_csv(std::ostream& out, const ComparisonReport& report);
ComparisonReport read_report_csv(std::istream& in);

struct FitGrid {
    double t_min = 0.99;
    double t_max = 1.01;
    std::size_t t_steps = 5;
    double eps_min = 0.0;
    double eps_max = 0.08;
    std::size_t eps_steps = 9;

    double t_at(std::size_t i) const;
    double eps_at(std::size_t i) const;
    double t_spacing() const;
    double eps_spacing() const;
};

struct FitSettings {
    std::size_t n_s = 65536;
    std::size_t n_r = kDefaultRepeats;
    std::uint64_t seed = 0;
    std::size_t refine_cycles = 2;
};

struct FitResult {
    double t = 1.0;
    double epsilon = 0.0;
    ComparisonReport report;
    // Optimum sat on a non-physical grid edge; best-on-grid returned unrefined.
    bool on_boundary = false;
    double resolution = kFitResolution;
    // Z at (t +- resolution, epsilon +- resolution).
    std::vector<double> corner_z;
    std::size_t evaluations = 0;
};

// Total-count chi-square for thermalized-squeezed inputs with the given (t, epsilon).
ComparisonReport total_count_comparison(const BinnedCounts& counts, const InputModel& base,
                                        const TransmissionMatrix& network, double t, double epsilon,
                                        const FitSettings& settings);

// Minimizes the total-count chi-square over the grid, then refines each axis
// by golden-section search. Simulations share one seed so the objective is
// smooth in (t, epsilon).
FitResult fit_decoherence(const BinnedCounts& counts, const InputModel& base, const TransmissionMatrix& network,
                          const FitGrid& grid, const FitSettings& settings);

} // namespace gbsval
