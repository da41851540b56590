#include "gbsval/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "gbsval/errors.hpp"

namespace gbsval {

Eigen::VectorXd OutputCovariance::symplectic_eigenvalues() const
{
    const Eigen::Index m = v.rows() / 2;
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    omega.topRightCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
    omega.bottomLeftCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(omega * v, false);
    const Eigen::VectorXd mags = solver.eigenvalues().cwiseAbs();
    // Eigenvalues come in pairs +-i nu.
    std::vector<double> sorted(mags.data(), mags.data() + mags.size());
    std::sort(sorted.begin(), sorted.end());
    Eigen::VectorXd nu(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        nu(i) = sorted[static_cast<std::size_t>(2 * i)];
    }
    return nu;
}

void OutputCovariance::validate() const
{
    if (v.rows() != v.cols() || v.rows() % 2 != 0) {
        throw NumericalError("covariance must be a square matrix of even size");
    }
    if (!v.allFinite() || (v - v.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, v.cwiseAbs().maxCoeff())) {
        throw NumericalError("covariance is not symmetric");
    }
    if (v.rows() == 0) {
        return;
    }
    const double nu_min = symplectic_eigenvalues().minCoeff();
    if (nu_min < 1.0 - 1e-9) {
        throw NumericalError("covariance violates the uncertainty bound (symplectic eigenvalue " +
                             std::to_string(nu_min) + ")");
    }
}

Eigen::MatrixXd OutputCovariance::ordered(double sigma) const
{
    return v + (2.0 * sigma - 1.0) * Eigen::MatrixXd::Identity(v.rows(), v.cols());
}

double OutputCovariance::vacuum_probability(std::span<const std::size_t> modes) const
{
    const auto m = static_cast<Eigen::Index>(this->modes());
    const auto s = static_cast<Eigen::Index>(modes.size());
    if (s == 0) {
        return 1.0;
    }
    Eigen::MatrixXd sub(2 * s, 2 * s);
    for (Eigen::Index a = 0; a < 2 * s; ++a) {
        const Eigen::Index ra = a < s ? static_cast<Eigen::Index>(modes[static_cast<std::size_t>(a)])
                                      : m + static_cast<Eigen::Index>(modes[static_cast<std::size_t>(a - s)]);
        for (Eigen::Index b = 0; b < 2 * s; ++b) {
            const Eigen::Index rb = b < s ? static_cast<Eigen::Index>(modes[static_cast<std::size_t>(b)])
                                          : m + static_cast<Eigen::Index>(modes[static_cast<std::size_t>(b - s)]);
            sub(a, b) = v(ra, rb);
        }
    }
    sub += Eigen::MatrixXd::Identity(2 * s, 2 * s);
    sub *= 0.5;
    const double det = sub.partialPivLu().determinant();
    if (!(det > 0.0)) {
        throw NumericalError("non-positive determinant in vacuum projection");
    }
    return 1.0 / std::sqrt(det);
}

OutputCovariance vacuum_covariance(std::size_t modes)
{
    const auto n = static_cast<Eigen::Index>(2 * modes);
    return OutputCovariance{Eigen::MatrixXd::Identity(n, n)};
}

OutputCovariance output_covariance(const InputModel& model, const TransmissionMatrix& network)
{
    model.validate();
    if (network.inputs() != model.modes()) {
        throw DataError("network inputs do not match the number of squeezing values");
    }
    const PhotonParams p = photon_params(model);
    const auto n_in = static_cast<Eigen::Index>(model.modes());
    const auto n_out = static_cast<Eigen::Index>(network.outputs());
    // V_in - I: 2(n + m) on x, 2(n - m) on y.
    Eigen::VectorXd excess(2 * n_in);
    for (Eigen::Index j = 0; j < n_in; ++j) {
        const auto i = static_cast<std::size_t>(j);
        excess(j) = 2.0 * (p.n[i] + p.coherence[i]);
        excess(n_in + j) = 2.0 * (p.n[i] - p.coherence[i]);
    }
    const Eigen::MatrixXcd t = network.rescaled(model.t).effective();
    const Eigen::MatrixXd a = t.real();
    const Eigen::MatrixXd b = t.imag();
    Eigen::MatrixXd s(2 * n_out, 2 * n_in);
    s << a, -b, b, a;
    OutputCovariance cov;
    cov.v = s * excess.asDiagonal() * s.transpose() + Eigen::MatrixXd::Identity(2 * n_out, 2 * n_out);
    cov.v = 0.5 * (cov.v + cov.v.transpose()).eval();
    cov.validate();
    return cov;
}

ClickPair exact_click_prob_single_mode(const InputModel& model)
{
    model.validate();
    if (model.modes() != 1) {
        throw ConfigError("single-mode click probability needs exactly one mode");
    }
    const PhotonParams p = photon_params(model);
    const double t2 = model.t * model.t;
    const double n = t2 * p.n[0];
    const double m = t2 * p.coherence[0];
    ClickPair out;
    out.p0 = 1.0 / std::sqrt((1.0 + n) * (1.0 + n) - m * m);
    out.p1 = 1.0 - out.p0;
    return out;
}

namespace {

void check_cap(std::size_t modes, std::size_t cap)
{
    if (modes > cap) {
        throw ConfigError("exact pattern probabilities are limited to " + std::to_string(cap) + " modes, got " +
                          std::to_string(modes));
    }
}

std::vector<std::size_t> modes_of(std::uint64_t mask)
{
    std::vector<std::size_t> out;
    while (mask) {
        out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
        mask &= mask - 1;
    }
    return out;
}

// f[U] = P(all modes in U empty).
std::vector<double> vacuum_table(const OutputCovariance& cov)
{
    const std::size_t m = cov.modes();
    const auto size = static_cast<long long>(std::uint64_t{1} << m);
    std::vector<double> f(static_cast<std::size_t>(size));
#pragma omp parallel for schedule(dynamic, 64)
    for (long long u = 0; u < size; ++u) {
        const auto modes = modes_of(static_cast<std::uint64_t>(u));
        f[static_cast<std::size_t>(u)] = cov.vacuum_probability(modes);
    }
    return f;
}

} // namespace

double exact_pattern_probability(const OutputCovariance& cov, std::span<const bool> pattern, std::size_t cap)
{
    const std::size_t m = cov.modes();
    check_cap(m, cap);
    if (pattern.size() != m) {
        throw DataError("pattern length does not match the covariance");
    }
    std::uint64_t clicked = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (pattern[i]) {
            clicked |= std::uint64_t{1} << i;
        }
    }
    const std::uint64_t empty = ((std::uint64_t{1} << m) - 1) & ~clicked;
    double total = 0.0;
    // Walk every subset B of the clicked set.
    std::uint64_t b = clicked;
    while (true) {
        const double sign = (std::popcount(b) % 2 == 0) ? 1.0 : -1.0;
        total += sign * cov.vacuum_probability(modes_of(empty | b));
        if (b == 0) {
            break;
        }
        b = (b - 1) & clicked;
    }
    return total;
}

std::vector<double> exact_pattern_distribution(const OutputCovariance& cov, std::size_t cap)
{
    const std::size_t m = cov.modes();
    check_cap(m, cap);
    std::vector<double> g = vacuum_table(cov);
    // Superset Moebius transform: g[V] = sum_{U >= V} (-1)^{|U \ V|} f[U],
    // the probability that exactly the modes in V are empty.
    const std::uint64_t size = std::uint64_t{1} << m;
    for (std::size_t i = 0; i < m; ++i) {
        const std::uint64_t bit = std::uint64_t{1} << i;
        for (std::uint64_t u = 0; u < size; ++u) {
            if (!(u & bit)) {
                g[u] -= g[u | bit];
            }
        }
    }
    std::vector<double> by_click(size);
    for (std::uint64_t v = 0; v < size; ++v) {
        by_click[(size - 1) & ~v] = g[v];
    }
    return by_click;
}

GcpEstimate exact_gcp(const OutputCovariance& cov, const BinningSpec& spec, std::size_t cap)
{
    spec.validate(cov.modes());
    const std::vector<double> dist = exact_pattern_distribution(cov, cap);
    GcpEstimate out;
    out.lattice = Lattice(spec.extents());
    out.values.assign(out.lattice.size(), 0.0);
    out.errors.assign(out.lattice.size(), 0.0);
    std::vector<std::uint64_t> masks(spec.dimension(), 0);
    for (std::size_t j = 0; j < spec.dimension(); ++j) {
        for (std::size_t mode : spec.subsets[j]) {
            masks[j] |= std::uint64_t{1} << mode;
        }
    }
    for (std::uint64_t c = 0; c < dist.size(); ++c) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < masks.size(); ++j) {
            idx += static_cast<std::size_t>(std::popcount(c & masks[j])) * out.lattice.stride(j);
        }
        out.values[idx] += dist[c];
    }
    std::vector<std::complex<double>> complex_values(out.values.begin(), out.values.end());
    out.fourier = forward_dft(out.lattice, complex_values);
    return out;
}

double exact_identity_correlation(const InputModel& model, const TransmissionMatrix& network,
                                  std::span<const std::size_t> modes)
{
    model.validate();
    if (!network.is_identity()) {
        throw ConfigError("exact intensity correlations need the identity network");
    }
    if (network.inputs() != model.modes()) {
        throw DataError("network size does not match the number of squeezing values");
    }
    validate_distinct_modes(modes, model.modes());
    const PhotonParams p = photon_params(model);
    const double t2 = model.t * model.t;
    double product = 1.0;
    for (std::size_t j : modes) {
        product *= t2 * p.n[j];
    }
    return product;
}

} // namespace gbsval
