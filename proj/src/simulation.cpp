#include "gbsval/simulation.hpp"

#include <algorithm>
#include <string>

#include "gbsval/errors.hpp"
#include "gbsval/kernels.hpp"

namespace gbsval {

Simulation::Simulation(SimulationSetup setup) : setup_(std::move(setup))
{
    setup_.model.validate();
    if (setup_.n_s == 0 || setup_.n_r == 0) {
        throw ConfigError("ensemble size must be at least one trajectory");
    }
    if (setup_.chunk == 0) {
        throw ConfigError("chunk size must be positive");
    }
    if (setup_.network.inputs() != setup_.model.modes()) {
        throw DataError("network has " + std::to_string(setup_.network.inputs()) + " inputs but the model has " +
                        std::to_string(setup_.model.modes()) + " squeezing values");
    }
    network_ = setup_.network.rescaled(setup_.model.t);
    if (setup_.model.ordering != Ordering::Normal && !network_.is_unitary()) {
        throw NumericalError("symmetric and anti-normal orderings require a unitary network");
    }
    variances_ = sigma_variances(setup_.model);
    classical_ = variances_classical(variances_);
}

void Simulation::for_each_chunk(std::size_t repeat, const ChunkVisitor& visit) const
{
    const auto inputs = static_cast<Eigen::Index>(network_.inputs());
    const auto outputs = static_cast<Eigen::Index>(network_.outputs());
    const Eigen::MatrixXcd t = network_.effective();
    const Eigen::MatrixXcd t_conj = t.conjugate();
    Eigen::MatrixXcd in_alpha, in_beta;
    AmplitudeEnsemble out;
    out.ordering = setup_.model.ordering;
    out.classical = classical_;
    for (std::size_t offset = 0; offset < setup_.n_s; offset += setup_.chunk) {
        const std::size_t count = std::min(setup_.chunk, setup_.n_s - offset);
        const auto cols = static_cast<Eigen::Index>(count);
        in_alpha.resize(inputs, cols);
        in_beta.resize(inputs, cols);
        const std::uint64_t first = repeat * setup_.n_s + offset;
        sample_input_block(variances_, setup_.seed, first, count, in_alpha, in_beta);
        out.alpha.resize(outputs, cols);
        out.beta.resize(outputs, cols);
        out.alpha.noalias() = t * in_alpha;
        out.beta.noalias() = t_conj * in_beta;
        out.n_s = count;
        out.n_r = 1;
        visit(out, first);
    }
}

GcpEstimate Simulation::gcp(const BinningSpec& spec) const
{
    spec.validate(output_modes());
    const kernels::FourierPlan plan(spec);
    const std::size_t nr = setup_.n_r;
    std::vector<std::vector<std::complex<double>>> repeat_fourier(nr);
    std::vector<std::size_t> clamped(nr, 0);
    const auto repeats = static_cast<long long>(nr);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < repeats; ++i) {
        const auto r = static_cast<std::size_t>(i);
        CompensatedComplexVector acc(plan.lattice().size());
        for_each_chunk(r, [&](const AmplitudeEnsemble& chunk, std::uint64_t) {
            const ClickWeights w = click_probabilities(chunk);
            clamped[r] += w.clamped;
            kernels::accumulate_fourier_serial(plan, w.vacuum, 0, w.vacuum.cols(), acc);
        });
        auto values = acc.values();
        for (auto& z : values) {
            z /= static_cast<double>(setup_.n_s);
        }
        repeat_fourier[r] = std::move(values);
    }
    std::size_t total_clamped = 0;
    for (std::size_t c : clamped) {
        total_clamped += c;
    }
    return finalize_gcp(plan.lattice(), repeat_fourier, total_clamped);
}

Estimate Simulation::intensity_correlation(std::span<const int> orders) const
{
    validate_orders(orders, output_modes(), setup_.model.ordering);
    std::vector<std::size_t> rows;
    std::vector<int> powers;
    for (std::size_t j = 0; j < orders.size(); ++j) {
        if (orders[j] > 0) {
            rows.push_back(j);
            powers.push_back(orders[j]);
        }
    }
    std::vector<double> means(setup_.n_r);
    const auto repeats = static_cast<long long>(setup_.n_r);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < repeats; ++i) {
        CompensatedComplexSum sum;
        for_each_chunk(static_cast<std::size_t>(i), [&](const AmplitudeEnsemble& chunk, std::uint64_t) {
            const Eigen::MatrixXcd n = output_photon_numbers(chunk);
            sum.add(kernels::product_sum_serial(n, rows, powers, 0, n.cols()));
        });
        means[static_cast<std::size_t>(i)] = sum.value().real() / static_cast<double>(setup_.n_s);
    }
    return repeat_statistics(means);
}

Estimate Simulation::marginal_moment(std::span<const std::size_t> modes) const
{
    validate_distinct_modes(modes, output_modes());
    const std::vector<int> powers(modes.size(), 1);
    std::vector<double> means(setup_.n_r);
    const auto repeats = static_cast<long long>(setup_.n_r);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < repeats; ++i) {
        CompensatedComplexSum sum;
        for_each_chunk(static_cast<std::size_t>(i), [&](const AmplitudeEnsemble& chunk, std::uint64_t) {
            const Eigen::MatrixXcd clicks = click_probabilities(chunk).clicks();
            sum.add(kernels::product_sum_serial(clicks, modes, powers, 0, clicks.cols()));
        });
        means[static_cast<std::size_t>(i)] = sum.value().real() / static_cast<double>(setup_.n_s);
    }
    return repeat_statistics(means);
}

Cumulants Simulation::cumulants_low_order(std::size_t j, std::size_t k) const
{
    if (j == k) {
        throw ConfigError("second cumulant needs two distinct modes");
    }
    const std::size_t pair[2] = {j, k};
    validate_distinct_modes(pair, output_modes());
    const int one[2] = {1, 1};
    const std::size_t nr = setup_.n_r;
    std::vector<std::complex<double>> mj(nr), mk(nr), mjk(nr);
    const auto ns = static_cast<double>(setup_.n_s);
    const auto repeats = static_cast<long long>(nr);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < repeats; ++i) {
        CompensatedComplexSum sj, sk, sjk;
        for_each_chunk(static_cast<std::size_t>(i), [&](const AmplitudeEnsemble& chunk, std::uint64_t) {
            const Eigen::MatrixXcd clicks = click_probabilities(chunk).clicks();
            const Eigen::Index n = clicks.cols();
            sj.add(kernels::product_sum_serial(clicks, std::span(pair, 1), std::span(one, 1), 0, n));
            sk.add(kernels::product_sum_serial(clicks, std::span(pair + 1, 1), std::span(one, 1), 0, n));
            sjk.add(kernels::product_sum_serial(clicks, pair, one, 0, n));
        });
        const auto r = static_cast<std::size_t>(i);
        mj[r] = sj.value() / ns;
        mk[r] = sk.value() / ns;
        mjk[r] = sjk.value() / ns;
    }
    return finalize_cumulants(mj, mk, mjk);
}

std::vector<Estimate> Simulation::click_rates() const
{
    const std::size_t modes = output_modes();
    const std::size_t nr = setup_.n_r;
    std::vector<std::vector<double>> means(modes, std::vector<double>(nr));
    const auto repeats = static_cast<long long>(nr);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < repeats; ++i) {
        std::vector<CompensatedComplexSum> sums(modes);
        for_each_chunk(static_cast<std::size_t>(i), [&](const AmplitudeEnsemble& chunk, std::uint64_t) {
            const ClickWeights w = click_probabilities(chunk);
            for (Eigen::Index k = 0; k < w.vacuum.cols(); ++k) {
                for (std::size_t j = 0; j < modes; ++j) {
                    sums[j].add(w.click(static_cast<Eigen::Index>(j), k));
                }
            }
        });
        for (std::size_t j = 0; j < modes; ++j) {
            means[j][static_cast<std::size_t>(i)] = sums[j].value().real() / static_cast<double>(setup_.n_s);
        }
    }
    std::vector<Estimate> out(modes);
    for (std::size_t j = 0; j < modes; ++j) {
        out[j] = repeat_statistics(means[j]);
    }
    return out;
}

} // namespace gbsval
