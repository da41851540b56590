// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gbsval/gaussian_input.hpp"
#include "gbsval/kernels.hpp"
#include "gbsval/network.hpp"
#include "gbsval/observables.hpp"

namespace {

using namespace gbsval;

constexpr Eigen::Index kModes = 32;

Eigen::MatrixXcd input_block(Eigen::Index cols)
{
    InputModel model;
    model.r.assign(kModes, 1.0);
    const auto ens = sample_input_ensemble(model, static_cast<std::size_t>(cols), 1, 7);
    return ens.alpha;
}

Eigen::MatrixXcd vacuum_block(Eigen::Index cols)
{
    InputModel model;
    model.r.assign(kModes, 0.8);
    const auto ens = apply_network(TransmissionMatrix(haar_unitary(kModes, 3), 0.9),
                                   sample_input_ensemble(model, static_cast<std::size_t>(cols), 1, 7));
    return click_probabilities(ens).vacuum;
}

template <bool Parallel>
void BM_Transform(benchmark::State& state)
{
    const Eigen::MatrixXcd t = haar_unitary(kModes, 1);
    const Eigen::MatrixXcd in = input_block(state.range(0));
    Eigen::MatrixXcd out(kModes, in.cols());
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::transform_parallel(t, in, out);
        } else {
            kernels::transform_serial(t, in, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Fourier(benchmark::State& state)
{
    const kernels::FourierPlan plan(BinningSpec::equal_split(kModes, 2));
    const Eigen::MatrixXcd vacuum = vacuum_block(state.range(0));
    for (auto _ : state) {
        CompensatedComplexVector acc(plan.lattice().size());
        if constexpr (Parallel) {
            kernels::accumulate_fourier_parallel(plan, vacuum, 0, vacuum.cols(), acc);
        } else {
            kernels::accumulate_fourier_serial(plan, vacuum, 0, vacuum.cols(), acc);
        }
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_ProductSum(benchmark::State& state)
{
    const Eigen::MatrixXcd vacuum = vacuum_block(state.range(0));
    const std::vector<std::size_t> rows = {0, 3, 5, 7, 11, 13, 17, 19};
    const std::vector<int> powers(rows.size(), 1);
    for (auto _ : state) {
        std::complex<double> s = Parallel ? kernels::product_sum_parallel(vacuum, rows, powers, 0, vacuum.cols())
                                          : kernels::product_sum_serial(vacuum, rows, powers, 0, vacuum.cols());
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Histogram(benchmark::State& state)
{
    const auto samples = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 gen(11);
    std::vector<std::uint64_t> words(samples);
    for (auto& w : words) {
        w = gen() & ((std::uint64_t{1} << kModes) - 1);
    }
    const std::vector<std::uint64_t> masks = {0x0000FFFFULL, 0xFFFF0000ULL};
    const Lattice lattice({17, 17});
    const kernels::PatternView view{words, 1, samples};
    for (auto _ : state) {
        auto h = Parallel ? kernels::histogram_parallel(view, masks, lattice)
                          : kernels::histogram_serial(view, masks, lattice);
        benchmark::DoNotOptimize(h.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_Transform<false>)->Name("transform/serial")->Arg(1 << 14);
BENCHMARK(BM_Transform<true>)->Name("transform/parallel")->Arg(1 << 14);
BENCHMARK(BM_Fourier<false>)->Name("fourier/serial")->Arg(1 << 13);
BENCHMARK(BM_Fourier<true>)->Name("fourier/parallel")->Arg(1 << 13);
BENCHMARK(BM_ProductSum<false>)->Name("product_sum/serial")->Arg(1 << 16);
BENCHMARK(BM_ProductSum<true>)->Name("product_sum/parallel")->Arg(1 << 16);
BENCHMARK(BM_Histogram<false>)->Name("histogram/serial")->Arg(1 << 20);
BENCHMARK(BM_Histogram<true>)->Name("histogram/parallel")->Arg(1 << 20);

BENCHMARK_MAIN();
