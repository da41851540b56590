#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gbsval/errors.hpp"
#include "gbsval/lattice.hpp"

using namespace gbsval;
using boost::multiprecision::cpp_int;

TEST_CASE("binning specs")
{
    const auto total = BinningSpec::total(5);
    CHECK(total.dimension() == 1);
    CHECK(total.extents() == std::vector<std::size_t>{6});
    const auto halves = BinningSpec::equal_split(6, 2);
    CHECK(halves.subsets[0] == std::vector<std::size_t>{0, 1, 2});
    CHECK(halves.subsets[1] == std::vector<std::size_t>{3, 4, 5});
    CHECK(halves.order() == 6);
    CHECK_THROWS_AS(BinningSpec::equal_split(6, 4), ConfigError);

    BinningSpec overlap{{{0, 1}, {1, 2}}};
    CHECK_THROWS_AS(overlap.validate(3), ConfigError);
    BinningSpec range{{{0, 7}}};
    CHECK_THROWS_AS(range.validate(4), ConfigError);
    BinningSpec empty{{{0}, {}}};
    CHECK_THROWS_AS(empty.validate(4), ConfigError);
    BinningSpec none;
    CHECK_THROWS_AS(none.validate(4), ConfigError);
}

TEST_CASE("lattice indexing is row-major with the first axis slowest")
{
    const Lattice l({3, 4, 2});
    CHECK(l.size() == 24);
    CHECK(l.stride(0) == 8);
    CHECK(l.stride(2) == 1);
    const std::vector<std::size_t> c = {2, 1, 1};
    CHECK(l.index(c) == 19);
    for (std::size_t i = 0; i < l.size(); ++i) {
        CHECK(l.index(l.coords(i)) == i);
    }
}

TEST_CASE("inverse DFT undoes the forward DFT")
{
    const Lattice l({4, 3});
    std::vector<std::complex<double>> x(l.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = {0.1 * static_cast<double>(i), -0.05 * static_cast<double>(i * i)};
    }
    const auto back = inverse_dft(l, forward_dft(l, x));
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(std::abs(back[i] - x[i]) < 1e-12);
    }
    // Point mass at m = 1 on one axis: Gt(k) = exp(-i k theta).
    const Lattice one({5});
    std::vector<std::complex<double>> delta(5, 0.0);
    delta[1] = 1.0;
    const auto f = forward_dft(one, delta);
    CHECK(std::abs(f[2] - std::polar(1.0, -2.0 * 2.0 * M_PI / 5.0)) < 1e-14);
}

TEST_CASE("bin and permutation counts")
{
    CHECK(bin_count(BinningSpec::total(144)) == 145);
    CHECK(bin_count(BinningSpec::equal_split(144, 2)) == 5329);
    CHECK(permutation_count(4, 2) == 3);
    CHECK(permutation_count(6, 3) == 5); // binom(6, 2) / 3
    CHECK(permutation_count(8, 1) == 1);
    cpp_int binom = 1; // binom(143, 71)
    for (int i = 1; i <= 71; ++i) {
        binom = binom * (143 - 71 + i) / i;
    }
    CHECK(permutation_count(144, 2) == binom);
    CHECK_THROWS_AS(permutation_count(5, 2), ConfigError);
}
