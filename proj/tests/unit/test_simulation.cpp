#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gbsval/errors.hpp"
#include "gbsval/kernels.hpp"
#include "gbsval/lattice.hpp"
#include "gbsval/network.hpp"
#include "gbsval/rng.hpp"
#include "gbsval/simulation.hpp"
#include "helpers.hpp"

using namespace gbsval;

namespace {

SimulationSetup setup_for(InputModel model, TransmissionMatrix t, std::size_t n_s, std::size_t n_r, std::uint64_t seed)
{
    SimulationSetup s;
    s.model = std::move(model);
    s.network = std::move(t);
    s.n_s = n_s;
    s.n_r = n_r;
    s.seed = seed;
    s.chunk = 300;
    return s;
}

} // namespace

TEST_CASE("streamed simulation matches the materialized ensemble")
{
    InputModel model = testing::pure(3, 0.9);
    model.t = 0.97;
    const auto net = random_lossy_network(5, 3, 0.9, 4);
    const Simulation sim(setup_for(model, net, 1000, 4, 77));
    const auto ens = apply_network(net.rescaled(model.t), sample_input_ensemble(model, 1000, 4, 77));

    const auto spec = BinningSpec{{{0, 1}, {2, 3, 4}}};
    const auto a = sim.gcp(spec);
    const auto b = gcp(ens, spec);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-10).scale(1.0));
        CHECK(a.errors[i] == doctest::Approx(b.errors[i]).epsilon(1e-8).scale(1e-6));
    }
    const std::vector<int> orders = {1, 0, 1, 1, 0};
    CHECK(sim.intensity_correlation(orders).mean ==
          doctest::Approx(intensity_correlation(ens, orders).mean).epsilon(1e-10));
    const std::vector<std::size_t> modes = {1, 4};
    CHECK(sim.marginal_moment(modes).mean == doctest::Approx(marginal_moment(ens, modes).mean).epsilon(1e-10));
    const auto c1 = sim.cumulants_low_order(0, 3);
    const auto c2 = cumulants_low_order(ens, 0, 3);
    CHECK(c1.kappa2.mean == doctest::Approx(c2.kappa2.mean).epsilon(1e-8).scale(1e-6));
    const auto rates = sim.click_rates();
    REQUIRE(rates.size() == 5);
    const std::vector<std::size_t> mode2 = {2};
    CHECK(rates[2].mean == doctest::Approx(marginal_moment(ens, mode2).mean).epsilon(1e-10));
}

TEST_CASE("results do not depend on thread count or chunk size")
{
    const auto net = random_lossy_network(6, 3, 0.8, 5);
    const int saved = kernels::max_threads();
    kernels::set_threads(1);
    const auto a = Simulation(setup_for(testing::pure(3, 1.0), net, 2000, 6, 3)).gcp(BinningSpec::equal_split(6, 3));
    kernels::set_threads(4);
    const auto b = Simulation(setup_for(testing::pure(3, 1.0), net, 2000, 6, 3)).gcp(BinningSpec::equal_split(6, 3));
    kernels::set_threads(saved);
    CHECK(a.values == b.values);
    CHECK(a.errors == b.errors);

    auto s = setup_for(testing::pure(3, 1.0), net, 2000, 6, 3);
    s.chunk = 2000;
    const auto c = Simulation(s).gcp(BinningSpec::equal_split(6, 3));
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        CHECK(c.values[i] == doctest::Approx(a.values[i]).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("single-mode click probabilities approach the closed forms")
{
    const auto p = Simulation(setup_for(testing::pure(1, 1.0), TransmissionMatrix::identity(1), 20000, 10, 1))
                       .gcp(BinningSpec::total(1));
    CHECK(testing::pull(p.values[0], 1.0 / std::cosh(1.0), p.errors[0]) < 4.0);
    const auto q = Simulation(setup_for(testing::squashed(1, 0.5), TransmissionMatrix::identity(1), 20000, 10, 1))
                       .gcp(BinningSpec::total(1));
    CHECK(testing::pull(q.values[0], std::sqrt(0.5), q.errors[0]) < 4.0);
}

TEST_CASE("simulation setup errors")
{
    CHECK_THROWS_AS(Simulation(setup_for(testing::pure(2, 1.0), TransmissionMatrix::identity(3), 10, 2, 0)), DataError);
    CHECK_THROWS_AS(Simulation(setup_for(testing::pure(2, 1.0), TransmissionMatrix::identity(2), 0, 2, 0)), ConfigError);
    InputModel q = testing::pure(2, 1.0);
    q.ordering = Ordering::Antinormal;
    CHECK_THROWS_AS(Simulation(setup_for(q, random_lossy_network(2, 2, 0.9, 1), 10, 2, 0)), NumericalError);
    q.t = 0.99;
    CHECK_THROWS_AS(Simulation(setup_for(q, TransmissionMatrix::identity(2), 10, 2, 0)), NumericalError);
}

TEST_CASE("GCP Fourier observable is the forward DFT of the bin values")
{
    // Real click probabilities keep each repeat's transform Hermitian.
    const Simulation sim(setup_for(testing::squashed(3, 0.7), random_lossy_network(5, 3, 0.8, 21), 4000, 4, 8));
    for (std::size_t d : {1, 2}) {
        const auto spec = d == 1 ? BinningSpec::total(5) : BinningSpec{{{0, 1}, {2, 3, 4}}};
        const auto g = sim.gcp(spec);
        std::vector<std::complex<double>> values(g.values.begin(), g.values.end());
        const auto f = forward_dft(g.lattice, values);
        REQUIRE(f.size() == g.fourier.size());
        for (std::size_t k = 0; k < f.size(); ++k) {
            CHECK(std::abs(f[k] - g.fourier[k]) < 1e-10);
        }
    }
}

TEST_CASE("total-count GCP is invariant under output permutations")
{
    const auto net = random_lossy_network(6, 3, 0.85, 31);
    const auto base = Simulation(setup_for(testing::pure(3, 1.0), net, 3000, 4, 12)).gcp(BinningSpec::total(6));
    for (std::uint64_t trial = 0; trial < 3; ++trial) {
        const auto perm = rng::random_permutation(6, 99, trial);
        const auto g = Simulation(setup_for(testing::pure(3, 1.0), permute_outputs(net, perm), 3000, 4, 12))
                           .gcp(BinningSpec::total(6));
        for (std::size_t b = 0; b < g.values.size(); ++b) {
            CHECK(g.values[b] == doctest::Approx(base.values[b]).epsilon(1e-9));
        }
    }
}

TEST_CASE("intensity correlations agree across orderings on a unitary network")
{
    const Eigen::MatrixXcd u = haar_unitary(4, 41);
    const std::vector<int> orders = {1, 1, 0, 0};
    Estimate e[3];
    const Ordering orderings[] = {Ordering::Normal, Ordering::Symmetric, Ordering::Antinormal};
    for (int o = 0; o < 3; ++o) {
        auto model = testing::pure(4, 0.6);
        model.ordering = orderings[o];
        e[o] = Simulation(setup_for(model, TransmissionMatrix(u), 25000, 8, 50 + o)).intensity_correlation(orders);
    }
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            CHECK(std::abs(e[a].mean - e[b].mean) < 5.0 * std::hypot(e[a].error, e[b].error));
        }
    }
}
