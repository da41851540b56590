#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gbsval {

enum class StateFamily { PureSqueezed, ThermalizedSqueezed, Thermal, Squashed };

// Operator ordering of the phase-space representation:
// normal (positive-P / Glauber P), symmetric (Wigner), anti-normal (Q).
enum class Ordering { Normal, Symmetric, Antinormal };

// Vacuum-noise offset sigma of an ordering: 0, 1/2 or 1.
double sigma_of(Ordering ordering);
Ordering ordering_from_sigma(double sigma);

std::string_view to_string(StateFamily family);
std::string_view to_string(Ordering ordering);
StateFamily parse_family(std::string_view text);

struct InputModel {
    std::vector<double> r;           // squeezing amplitude per input mode
    double epsilon = 0.0;            // thermalization fraction
    double t = 1.0;                  // amplitude transmission correction
    Ordering ordering = Ordering::Normal;
    StateFamily family = StateFamily::PureSqueezed;

    std::size_t modes() const { return r.size(); }

    // Thermalization actually applied: 0 for pure, 1 for thermal inputs.
    double effective_epsilon() const;

    bool is_classical_family() const
    {
        return family == StateFamily::Thermal || family == StateFamily::Squashed;
    }

    // Throws ConfigError when the parameters are out of domain.
    void validate() const;
};

struct PhotonParams {
    std::vector<double> n;         // photon number sinh^2(r)
    std::vector<double> coherence; // (1 - epsilon) cosh(r) sinh(r)
};

PhotonParams derive_photon_params(const std::vector<double>& r, double epsilon);

// Per-family photon number and coherence of a model (squashed: m = n, thermal: m = 0).
PhotonParams photon_params(const InputModel& model);

// Squeezing amplitude giving photon number n.
double squeezing_for_photon_number(double n);

struct QuadratureVariances {
    std::vector<double> dx2;
    std::vector<double> dy2; // negative only for nonclassical modes at normal ordering
};

QuadratureVariances sigma_variances(const InputModel& model);

// Paired stochastic amplitudes, one column per trajectory. Trajectories of
// repeat i occupy columns [i * n_s, (i + 1) * n_s).
struct AmplitudeEnsemble {
    Eigen::MatrixXcd alpha;
    Eigen::MatrixXcd beta;
    Ordering ordering = Ordering::Normal;
    std::size_t n_s = 0;
    std::size_t n_r = 0;
    bool classical = true; // beta == conj(alpha) for every mode

    std::size_t modes() const { return static_cast<std::size_t>(alpha.rows()); }
    std::size_t trajectories() const { return static_cast<std::size_t>(alpha.cols()); }
};

// Draws trajectories [first, first + count) of the ensemble keyed by the
// amplitude stream of `seed`. Any block decomposition yields the same
// amplitudes as a single call over the whole range.
void sample_input_block(const QuadratureVariances& variances, std::uint64_t seed, std::uint64_t first,
                        std::size_t count, Eigen::Ref<Eigen::MatrixXcd> alpha,
                        Eigen::Ref<Eigen::MatrixXcd> beta);

bool variances_classical(const QuadratureVariances& variances);

AmplitudeEnsemble sample_input_ensemble(const InputModel& model, std::size_t n_s, std::size_t n_r,
                                        std::uint64_t seed);

} // namespace gbsval
