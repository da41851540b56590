#include <algorithm>
#include <cmath>
#include <numbers>

#include "gbsval/kernels.hpp"

namespace gbsval::kernels {

FourierPlan::FourierPlan(const BinningSpec& spec) : spec_(spec), lattice_(spec.extents())
{
    for (const auto& subset : spec_.subsets) {
        const std::size_t len = subset.size() + 1;
        std::vector<std::complex<double>> w(len);
        for (std::size_t k = 0; k < len; ++k) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
            w[k] = {std::cos(angle), std::sin(angle)};
        }
        twiddles_.push_back(std::move(w));
    }
}

void FourierPlan::trajectory_term(const std::complex<double>* vacuum, std::vector<std::complex<double>>& factors,
                                  std::vector<std::complex<double>>& term) const
{
    term.assign(lattice_.size(), {0.0, 0.0});
    term[0] = 1.0;
    std::size_t filled = 1;
    for (std::size_t axis = 0; axis < spec_.subsets.size(); ++axis) {
        const auto& w = twiddles_[axis];
        const std::size_t len = w.size();
        // f(k) = prod_{i in S_j} (pi_i(0) + pi_i(1) e^{-i k theta_j})
        factors.assign(len, {1.0, 0.0});
        for (std::size_t mode : spec_.subsets[axis]) {
            const std::complex<double> p0 = vacuum[mode];
            const std::complex<double> p1 = 1.0 - p0;
            for (std::size_t k = 0; k < len; ++k) {
                factors[k] *= p0 + p1 * w[k];
            }
        }
        // Outer product: the new axis varies fastest.
        for (std::size_t i = filled; i-- > 0;) {
            const std::complex<double> base = term[i];
            for (std::size_t k = 0; k < len; ++k) {
                term[i * len + k] = base * factors[k];
            }
        }
        filled *= len;
    }
}

void accumulate_fourier_serial(const FourierPlan& plan, const Eigen::MatrixXcd& vacuum, Eigen::Index begin,
                               Eigen::Index end, CompensatedComplexVector& acc)
{
    std::vector<std::complex<double>> factors;
    std::vector<std::complex<double>> term;
    for (Eigen::Index k = begin; k < end; ++k) {
        plan.trajectory_term(vacuum.col(k).data(), factors, term);
        for (std::size_t i = 0; i < term.size(); ++i) {
            acc.add(i, term[i]);
        }
    }
}

void accumulate_fourier_parallel(const FourierPlan& plan, const Eigen::MatrixXcd& vacuum, Eigen::Index begin,
                                 Eigen::Index end, CompensatedComplexVector& acc)
{
    const Eigen::Index n = end - begin;
    if (n <= 0) {
        return;
    }
    constexpr Eigen::Index kMaxBlocks = 64;
    const Eigen::Index block = std::max<Eigen::Index>(1024, (n + kMaxBlocks - 1) / kMaxBlocks);
    const Eigen::Index blocks = (n + block - 1) / block;
    std::vector<CompensatedComplexVector> partial(static_cast<std::size_t>(blocks),
                                                  CompensatedComplexVector(plan.lattice().size()));
#pragma omp parallel for schedule(dynamic, 1)
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const Eigen::Index first = begin + b * block;
        const Eigen::Index last = std::min(end, first + block);
        accumulate_fourier_serial(plan, vacuum, first, last, partial[static_cast<std::size_t>(b)]);
    }
    for (const auto& p : partial) {
        acc.merge(p);
    }
}

namespace {

std::complex<double> trajectory_product(const Eigen::MatrixXcd& values, std::span<const std::size_t> rows,
                                        std::span<const int> powers, Eigen::Index k)
{
    std::complex<double> prod = 1.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::complex<double> v = values(static_cast<Eigen::Index>(rows[i]), k);
        for (int p = 0; p < powers[i]; ++p) {
            prod *= v;
        }
    }
    return prod;
}

} // namespace

std::complex<double> product_sum_serial(const Eigen::MatrixXcd& values, std::span<const std::size_t> rows,
                                        std::span<const int> powers, Eigen::Index begin, Eigen::Index end)
{
    CompensatedComplexSum sum;
    for (Eigen::Index k = begin; k < end; ++k) {
        sum.add(trajectory_product(values, rows, powers, k));
    }
    return sum.value();
}

std::complex<double> product_sum_parallel(const Eigen::MatrixXcd& values, std::span<const std::size_t> rows,
                                          std::span<const int> powers, Eigen::Index begin, Eigen::Index end)
{
    const Eigen::Index n = end - begin;
    if (n <= 0) {
        return 0.0;
    }
    constexpr Eigen::Index kBlock = 4096;
    const Eigen::Index blocks = (n + kBlock - 1) / kBlock;
    std::vector<CompensatedComplexSum> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const Eigen::Index first = begin + b * kBlock;
        const Eigen::Index last = std::min(end, first + kBlock);
        auto& s = partial[static_cast<std::size_t>(b)];
        for (Eigen::Index k = first; k < last; ++k) {
            s.add(trajectory_product(values, rows, powers, k));
        }
    }
    CompensatedComplexSum total;
    for (const auto& p : partial) {
        total.merge(p);
    }
    return total.value();
}

} // namespace gbsval::kernels
