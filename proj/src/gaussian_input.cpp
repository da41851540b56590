#include "gbsval/gaussian_input.hpp"

#include <cmath>
#include <string>

#include "gbsval/errors.hpp"
#include "gbsval/rng.hpp"

namespace gbsval {

double sigma_of(Ordering ordering)
{
    switch (ordering) {
    case Ordering::Normal:
        return 0.0;
    case Ordering::Symmetric:
        return 0.5;
    case Ordering::Antinormal:
        return 1.0;
    }
    return 0.0;
}

Ordering ordering_from_sigma(double sigma)
{
    if (sigma == 0.0) {
        return Ordering::Normal;
    }
    if (sigma == 0.5) {
        return Ordering::Symmetric;
    }
    if (sigma == 1.0) {
        return Ordering::Antinormal;
    }
    throw ConfigError("ordering sigma must be 0, 0.5 or 1, got " + std::to_string(sigma));
}

std::string_view to_string(StateFamily family)
{
    switch (family) {
    case StateFamily::PureSqueezed:
        return "pure";
    case StateFamily::ThermalizedSqueezed:
        return "thermalized";
    case StateFamily::Thermal:
        return "thermal";
    case StateFamily::Squashed:
        return "squashed";
    }
    return "?";
}

std::string_view to_string(Ordering ordering)
{
    switch (ordering) {
    case Ordering::Normal:
        return "normal";
    case Ordering::Symmetric:
        return "symmetric";
    case Ordering::Antinormal:
        return "antinormal";
    }
    return "?";
}

StateFamily parse_family(std::string_view text)
{
    if (text == "pure") {
        return StateFamily::PureSqueezed;
    }
    if (text == "thermalized") {
        return StateFamily::ThermalizedSqueezed;
    }
    if (text == "thermal") {
        return StateFamily::Thermal;
    }
    if (text == "squashed") {
        return StateFamily::Squashed;
    }
    throw ConfigError("unknown state family '" + std::string(text) +
                      "' (expected pure, thermalized, thermal or squashed)");
}

double InputModel::effective_epsilon() const
{
    switch (family) {
    case StateFamily::PureSqueezed:
        return 0.0;
    case StateFamily::Thermal:
        return 1.0;
    default:
        return epsilon;
    }
}

void InputModel::validate() const
{
    if (r.empty()) {
        throw ConfigError("input model has no modes");
    }
    for (std::size_t j = 0; j < r.size(); ++j) {
        if (!std::isfinite(r[j])) {
            throw ConfigError("squeezing r[" + std::to_string(j) + "] is not finite");
        }
    }
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw ConfigError("thermalization epsilon must lie in [0, 1]");
    }
    if (family == StateFamily::PureSqueezed && epsilon != 0.0) {
        throw ConfigError("pure squeezed inputs require epsilon = 0");
    }
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw ConfigError("transmission correction t must be positive and finite");
    }
    if (family == StateFamily::Squashed && ordering != Ordering::Normal) {
        throw ConfigError("squashed inputs are only defined for normal ordering (sigma = 0)");
    }
}

PhotonParams derive_photon_params(const std::vector<double>& r, double epsilon)
{
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw ConfigError("thermalization epsilon must lie in [0, 1]");
    }
    PhotonParams out;
    out.n.reserve(r.size());
    out.coherence.reserve(r.size());
    for (double rj : r) {
        if (!std::isfinite(rj)) {
            throw ConfigError("squeezing amplitude is not finite");
        }
        const double s = std::sinh(rj);
        out.n.push_back(s * s);
        out.coherence.push_back((1.0 - epsilon) * std::cosh(rj) * s);
    }
    return out;
}

PhotonParams photon_params(const InputModel& model)
{
    PhotonParams p = derive_photon_params(model.r, model.effective_epsilon());
    if (model.family == StateFamily::Squashed) {
        p.coherence = p.n;
    }
    return p;
}

double squeezing_for_photon_number(double n)
{
    return std::asinh(std::sqrt(n));
}

QuadratureVariances sigma_variances(const InputModel& model)
{
    model.validate();
    const PhotonParams p = photon_params(model);
    const double sigma = sigma_of(model.ordering);
    QuadratureVariances v;
    v.dx2.resize(p.n.size());
    v.dy2.resize(p.n.size());
    for (std::size_t j = 0; j < p.n.size(); ++j) {
        if (model.family == StateFamily::Squashed) {
            v.dx2[j] = 4.0 * p.n[j];
            v.dy2[j] = 0.0;
        } else {
            v.dx2[j] = 2.0 * (p.n[j] + sigma + p.coherence[j]);
            v.dy2[j] = 2.0 * (p.n[j] + sigma - p.coherence[j]);
        }
    }
    return v;
}

bool variances_classical(const QuadratureVariances& variances)
{
    for (double dy2 : variances.dy2) {
        if (dy2 < 0.0) {
            return false;
        }
    }
    return true;
}

void sample_input_block(const QuadratureVariances& variances, std::uint64_t seed, std::uint64_t first,
                        std::size_t count, Eigen::Ref<Eigen::MatrixXcd> alpha,
                        Eigen::Ref<Eigen::MatrixXcd> beta)
{
    const std::size_t modes = variances.dx2.size();
    const rng::CounterRng gen(rng::stream_key(seed, rng::kAmplitudes));
    std::vector<double> dx(modes), dy(modes);
    std::vector<bool> imaginary_y(modes);
    for (std::size_t j = 0; j < modes; ++j) {
        dx[j] = std::sqrt(variances.dx2[j]);
        imaginary_y[j] = variances.dy2[j] < 0.0;
        dy[j] = std::sqrt(std::abs(variances.dy2[j]));
    }
    for (std::size_t k = 0; k < count; ++k) {
        const std::uint64_t trajectory = first + k;
        const auto col = static_cast<Eigen::Index>(k);
        for (std::size_t j = 0; j < modes; ++j) {
            const auto row = static_cast<Eigen::Index>(j);
            // (w_j, w_{j+M}) for this mode and trajectory.
            const auto [wx, wy] = gen.normal_pair(trajectory, j);
            const double x = 0.5 * dx[j] * wx;
            const double y = 0.5 * dy[j] * wy;
            if (imaginary_y[j]) {
                // Delta_y = i|Delta_y|: alpha and beta become real and independent.
                alpha(row, col) = {x - y, 0.0};
                beta(row, col) = {x + y, 0.0};
            } else {
                alpha(row, col) = {x, y};
                beta(row, col) = {x, -y};
            }
        }
    }
}

AmplitudeEnsemble sample_input_ensemble(const InputModel& model, std::size_t n_s, std::size_t n_r,
                                        std::uint64_t seed)
{
    if (n_s == 0 || n_r == 0) {
        throw ConfigError("ensemble size must be at least one trajectory");
    }
    const QuadratureVariances v = sigma_variances(model);
    const std::size_t total = n_s * n_r;
    AmplitudeEnsemble ens;
    ens.alpha.resize(static_cast<Eigen::Index>(model.modes()), static_cast<Eigen::Index>(total));
    ens.beta.resizeLike(ens.alpha);
    ens.ordering = model.ordering;
    ens.n_s = n_s;
    ens.n_r = n_r;
    ens.classical = variances_classical(v);
    sample_input_block(v, seed, 0, total, ens.alpha, ens.beta);
    return ens;
}

} // namespace gbsval
