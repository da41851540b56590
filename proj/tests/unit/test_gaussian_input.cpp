#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gbsval/errors.hpp"
#include "gbsval/gaussian_input.hpp"
#include "helpers.hpp"

using namespace gbsval;

TEST_CASE("photon parameters of squeezed, thermalized and thermal inputs")
{
    const double s = std::sinh(1.0), c = std::cosh(1.0);
    const auto pure = derive_photon_params({1.0}, 0.0);
    CHECK(pure.n[0] == doctest::Approx(s * s).epsilon(1e-15));
    CHECK(pure.n[0] == doctest::Approx(1.3810978455).epsilon(1e-9));
    CHECK(pure.coherence[0] == doctest::Approx(c * s).epsilon(1e-15));

    const auto mixed = derive_photon_params({1.0}, 0.04);
    CHECK(mixed.n[0] == doctest::Approx(s * s));
    CHECK(mixed.coherence[0] == doctest::Approx(0.96 * c * s));

    InputModel thermal = testing::pure(1, 1.0);
    thermal.family = StateFamily::Thermal;
    thermal.epsilon = 0.3; // ignored
    CHECK(photon_params(thermal).coherence[0] == 0.0);
    CHECK(photon_params(thermal).n[0] == doctest::Approx(s * s));

    const auto sq = photon_params(testing::squashed(1, 0.5));
    CHECK(sq.n[0] == doctest::Approx(0.5));
    CHECK(sq.coherence[0] == doctest::Approx(0.5));
    CHECK(squeezing_for_photon_number(s * s) == doctest::Approx(1.0));
}

TEST_CASE("sigma-ordered quadrature variances")
{
    InputModel m = testing::pure(1, 1.0);
    auto v = sigma_variances(m);
    CHECK(v.dx2[0] == doctest::Approx(std::exp(2.0) - 1.0));
    CHECK(v.dy2[0] == doctest::Approx(std::exp(-2.0) - 1.0));
    CHECK_FALSE(variances_classical(v));

    m.ordering = Ordering::Symmetric;
    v = sigma_variances(m);
    CHECK(v.dx2[0] == doctest::Approx(std::exp(2.0)));
    CHECK(v.dy2[0] == doctest::Approx(std::exp(-2.0)));
    CHECK(variances_classical(v));

    m.ordering = Ordering::Antinormal;
    v = sigma_variances(m);
    CHECK(v.dx2[0] == doctest::Approx(std::exp(2.0) + 1.0));

    v = sigma_variances(testing::squashed(1, 0.5));
    CHECK(v.dx2[0] == doctest::Approx(2.0));
    CHECK(v.dy2[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("ordering and family parsing")
{
    CHECK(sigma_of(Ordering::Symmetric) == 0.5);
    CHECK(ordering_from_sigma(1.0) == Ordering::Antinormal);
    CHECK_THROWS_AS(ordering_from_sigma(0.3), ConfigError);
    CHECK(parse_family("thermalized") == StateFamily::ThermalizedSqueezed);
    CHECK_THROWS_AS(parse_family("coherent"), ConfigError);
}

TEST_CASE("model validation rejects out-of-domain parameters")
{
    InputModel m;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m = testing::pure(2, 1.0);
    CHECK_NOTHROW(m.validate());
    m.epsilon = 0.1;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m.family = StateFamily::ThermalizedSqueezed;
    CHECK_NOTHROW(m.validate());
    m.epsilon = 1.5;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m.epsilon = 0.1;
    m.t = 0.0;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m.t = 1.0;
    m.r[1] = std::nan("");
    CHECK_THROWS_AS(m.validate(), ConfigError);

    auto sq = testing::squashed(1, 0.5);
    sq.ordering = Ordering::Symmetric;
    CHECK_THROWS_AS(sq.validate(), ConfigError);
    CHECK_THROWS_AS(sample_input_ensemble(testing::pure(1, 1.0), 0, 4, 1), ConfigError);
}

TEST_CASE("ensemble moments match the input state")
{
    const double n = std::sinh(1.0) * std::sinh(1.0);
    const double m = std::cosh(1.0) * std::sinh(1.0);
    for (auto ordering : {Ordering::Normal, Ordering::Symmetric, Ordering::Antinormal}) {
        InputModel model = testing::pure(1, 1.0);
        model.ordering = ordering;
        const auto ens = sample_input_ensemble(model, 200000, 1, 17);
        const Eigen::ArrayXcd ab = (ens.alpha.array() * ens.beta.array()).row(0);
        const Eigen::ArrayXcd aa = (ens.alpha.array() * ens.alpha.array()).row(0);
        const double mean_ab = ab.real().mean() - sigma_of(ordering);
        const double sd_ab = std::sqrt((ab.real() - ab.real().mean()).square().mean() / ab.size());
        const double mean_aa = aa.real().mean();
        const double sd_aa = std::sqrt((aa.real() - aa.real().mean()).square().mean() / aa.size());
        CAPTURE(to_string(ordering));
        CHECK(testing::pull(mean_ab, n, sd_ab) < 5.0);
        CHECK(testing::pull(mean_aa, m, sd_aa) < 5.0);
    }
}

TEST_CASE("classical ensembles pair beta with conj(alpha)")
{
    InputModel thermal = testing::pure(3, 0.7);
    thermal.family = StateFamily::Thermal;
    const auto ens = sample_input_ensemble(thermal, 1000, 2, 4);
    CHECK(ens.classical);
    CHECK((ens.beta - ens.alpha.conjugate()).cwiseAbs().maxCoeff() == 0.0);
    CHECK_FALSE(sample_input_ensemble(testing::pure(1, 1.0), 10, 1, 4).classical);
}

TEST_CASE("block sampling is independent of the block decomposition")
{
    const auto v = sigma_variances(testing::pure(4, 0.9));
    Eigen::MatrixXcd a1(4, 100), b1(4, 100), a2(4, 100), b2(4, 100);
    sample_input_block(v, 21, 0, 100, a1, b1);
    sample_input_block(v, 21, 0, 37, a2.leftCols(37), b2.leftCols(37));
    sample_input_block(v, 21, 37, 63, a2.rightCols(63), b2.rightCols(63));
    CHECK(a1 == a2);
    CHECK(b1 == b2);

    const auto ens = sample_input_ensemble(testing::pure(4, 0.9), 50, 2, 21);
    CHECK(ens.alpha == a1);
    CHECK(ens.n_s == 50);
    CHECK(ens.n_r == 2);

    Eigen::MatrixXcd a3(4, 100), b3(4, 100);
    sample_input_block(v, 22, 0, 100, a3, b3);
    CHECK(a3 != a1);
}
