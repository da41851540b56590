#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gbsval/counts.hpp"
#include "gbsval/errors.hpp"
#include "gbsval/rng.hpp"
#include "helpers.hpp"

using namespace gbsval;

namespace {

PatternSet text_patterns(const std::string& text)
{
    std::istringstream in(text);
    return read_patterns_text(in);
}

std::uint64_t at(const BinnedCounts& c, std::vector<std::size_t> coords)
{
    return c.counts[c.lattice.index(coords)];
}

} // namespace

TEST_CASE("text pattern ingestion")
{
    const auto ps = text_patterns("0101\n1100\n");
    CHECK(ps.modes() == 4);
    CHECK(ps.samples() == 2);
    CHECK(ps.bit(0, 1));
    CHECK_FALSE(ps.bit(0, 0));
    CHECK(ps.clicks(1) == 2);
    CHECK(ps.pattern_string(1) == "1100");
    CHECK_THROWS_AS(text_patterns(""), DataError);
    CHECK_THROWS_AS(text_patterns("# only a comment\n"), DataError);
    CHECK_THROWS_AS(text_patterns("0101\n110\n"), DataError);
    CHECK_THROWS_AS(text_patterns("0101\n1102\n"), DataError);
    CHECK_THROWS_AS(text_patterns("0101\n# late\n1100\n"), DataError);
}

TEST_CASE("text round trip keeps provenance")
{
    PatternSet ps(70);
    ps.set_provenance(Provenance::ClassicalFake, StateFamily::Squashed);
    ps.append_zero(3);
    ps.set_bit(0, 69);
    ps.set_bit(2, 0);
    ps.set_bit(2, 64);
    std::stringstream ss;
    write_patterns_text(ss, ps);
    const auto back = read_patterns_text(ss);
    CHECK(back.words() == ps.words());
    CHECK(back.provenance() == Provenance::ClassicalFake);
    CHECK(back.fake_family() == StateFamily::Squashed);
}

TEST_CASE("packed format layout, round trip and truncation")
{
    const auto ps = text_patterns("100000001\n010000000\n");
    std::stringstream ss;
    write_patterns_packed(ss, ps);
    const std::string bytes = ss.str();
    REQUIRE(bytes.size() == 5 + 4 + 8 + 2 * 2);
    CHECK(bytes.substr(0, 5) == "GBSP1");
    CHECK(static_cast<unsigned char>(bytes[5]) == 9);
    CHECK(static_cast<unsigned char>(bytes[9]) == 2);
    CHECK(static_cast<unsigned char>(bytes[17]) == 0x01); // mode 0 -> LSB of byte 0
    CHECK(static_cast<unsigned char>(bytes[18]) == 0x01); // mode 8 -> LSB of byte 1
    CHECK(static_cast<unsigned char>(bytes[19]) == 0x02);
    std::istringstream in(bytes);
    CHECK(read_patterns_packed(in).words() == ps.words());

    // Declared 10 records, 9 present.
    PatternSet ten(4);
    ten.append_zero(10);
    std::stringstream full;
    write_patterns_packed(full, ten);
    std::string cut = full.str();
    cut.pop_back();
    std::istringstream truncated(cut);
    CHECK_THROWS_AS(read_patterns_packed(truncated), DataError);
    std::istringstream bad_magic("GBSP2" + cut.substr(5));
    CHECK_THROWS_AS(read_patterns_packed(bad_magic), DataError);
}

TEST_CASE("ingest detects the file format")
{
    const auto dir = testing::fresh_dir("ingest");
    const auto ps = text_patterns("0110\n1111\n0000\n");
    {
        std::ofstream out(dir / "p.gbsp", std::ios::binary);
        write_patterns_packed(out, ps);
    }
    testing::spit(dir / "p.txt", "# header\n0110\n1111\n0000\n");
    CHECK(ingest_patterns(dir / "p.gbsp").words() == ps.words());
    CHECK(ingest_patterns(dir / "p.txt").words() == ps.words());
    CHECK_THROWS_AS(ingest_patterns(dir / "none.txt"), DataError);
}

TEST_CASE("binning patterns")
{
    const auto ps = text_patterns("0101\n1100\n");
    const auto total = bin_patterns(ps, BinningSpec::total(4));
    CHECK(total.counts == std::vector<std::uint64_t>{0, 0, 2, 0, 0});
    CHECK(total.probability(2) == 1.0);
    const auto halves = bin_patterns(ps, BinningSpec::equal_split(4, 2));
    CHECK(at(halves, {1, 1}) == 1);
    CHECK(at(halves, {2, 0}) == 1);
    const std::vector<std::size_t> identity = {0, 1, 2, 3};
    CHECK(bin_patterns(ps, BinningSpec::equal_split(4, 2), std::span<const std::size_t>(identity)).counts ==
          halves.counts);
    const std::vector<std::size_t> swap = {2, 3, 0, 1};
    const auto swapped = bin_patterns(ps, BinningSpec::equal_split(4, 2), std::span<const std::size_t>(swap));
    CHECK(at(swapped, {1, 1}) == 1);
    CHECK(at(swapped, {0, 2}) == 1);
    CHECK_THROWS_AS(bin_patterns(ps, BinningSpec::total(5)), ConfigError);
    const std::vector<std::size_t> bad = {0, 0, 1, 2};
    CHECK_THROWS_AS(bin_patterns(ps, BinningSpec::total(4), std::span<const std::size_t>(bad)), ConfigError);
}

TEST_CASE("bin totals equal N and total counts are permutation invariant")
{
    const auto ps = generate_fakes(testing::squashed(4, 0.6), random_lossy_network(8, 4, 0.9, 3), 3000, 9);
    const auto base = bin_patterns(ps, BinningSpec::total(8));
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        const auto perm = rng::random_permutation(8, 1, trial);
        const auto t = bin_patterns(ps, BinningSpec::total(8), std::span<const std::size_t>(perm));
        CHECK(t.counts == base.counts);
        for (std::size_t d : {2, 4, 8}) {
            const auto c = bin_patterns(ps, BinningSpec::equal_split(8, d), std::span<const std::size_t>(perm));
            CHECK(std::accumulate(c.counts.begin(), c.counts.end(), std::uint64_t{0}) == 3000);
        }
    }
}

TEST_CASE("counts CSV round trip")
{
    const auto ps = text_patterns("0101\n1100\n0000\n1111\n");
    const auto c = bin_patterns(ps, BinningSpec::equal_split(4, 2));
    std::stringstream ss;
    write_counts_csv(ss, c);
    CHECK(ss.str().find("m1,m2,count,probability\n") != std::string::npos);
    const auto back = read_counts_csv(ss);
    CHECK(back.lattice == c.lattice);
    CHECK(back.counts == c.counts);
    CHECK(back.n_samples == 4);
    std::istringstream wrong("# n_samples=5\nm1,count,probability\n0,1,0.2\n1,1,0.2\n");
    CHECK_THROWS_AS(read_counts_csv(wrong), DataError);
}

TEST_CASE("classical fakes")
{
    CHECK_THROWS_AS(generate_fakes(testing::pure(2, 1.0), TransmissionMatrix::identity(2), 10, 1), ConfigError);
    CHECK_THROWS_AS(generate_fakes(testing::squashed(2, 0.5), TransmissionMatrix::identity(2), 0, 1), ConfigError);

    const auto dark = generate_fakes(testing::squashed(3, 0.5), TransmissionMatrix(Eigen::MatrixXcd::Zero(3, 3)), 500, 2);
    CHECK(std::all_of(dark.words().begin(), dark.words().end(), [](std::uint64_t w) { return w == 0; }));

    const std::size_t n = 200000;
    const auto one = generate_fakes(testing::squashed(1, 0.5), TransmissionMatrix::identity(1), n, 3);
    double clicks = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        clicks += one.bit(s, 0) ? 1.0 : 0.0;
    }
    const double p = 1.0 - std::sqrt(0.5);
    CHECK(testing::pull(clicks / n, p, std::sqrt(p * (1 - p) / n)) < 3.0);

    const auto again = generate_fakes(testing::squashed(1, 0.5), TransmissionMatrix::identity(1), 1000, 3);
    for (std::size_t s = 0; s < 1000; ++s) {
        CHECK(again.bit(s, 0) == one.bit(s, 0));
    }
    CHECK(one.provenance() == Provenance::ClassicalFake);
}

TEST_CASE("fake click frequencies match the phase-space click rates")
{
    InputModel thermal = testing::pure(4, 0.9);
    thermal.family = StateFamily::Thermal;
    const auto net = random_lossy_network(6, 4, 0.85, 7);
    const std::size_t n = 100000;
    const auto ps = generate_fakes(thermal, net, n, 12);
    SimulationSetup s;
    s.model = thermal;
    s.network = net;
    s.n_s = 50000;
    s.n_r = 8;
    s.seed = 99;
    const auto rates = Simulation(s).click_rates();
    for (std::size_t j = 0; j < 6; ++j) {
        double f = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            f += ps.bit(k, j) ? 1.0 : 0.0;
        }
        f /= static_cast<double>(n);
        const double se = std::hypot(std::sqrt(f * (1 - f) / n), rates[j].error);
        CAPTURE(j);
        CHECK(testing::pull(f, rates[j].mean, se) < 5.0);
    }
}

TEST_CASE("fake bits are conditionally independent given the trajectory")
{
    const auto model = testing::squashed(3, 0.7);
    const auto net = random_lossy_network(4, 3, 0.9, 2);
    const std::size_t n = 120000;
    const std::uint64_t seed = 31;
    const auto ps = generate_fakes(model, net, n, seed);

    // Replay the same trajectories to recover the per-mode click probabilities.
    SimulationSetup s;
    s.model = model;
    s.network = net;
    s.n_s = n;
    s.n_r = 1;
    s.seed = seed;
    std::vector<double> pj(n), pk(n);
    Simulation(s).for_each_chunk(0, [&](const AmplitudeEnsemble& chunk, std::uint64_t first) {
        for (Eigen::Index c = 0; c < chunk.alpha.cols(); ++c) {
            pj[first + static_cast<std::uint64_t>(c)] = -std::expm1(-std::norm(chunk.alpha(0, c)));
            pk[first + static_cast<std::uint64_t>(c)] = -std::expm1(-std::norm(chunk.alpha(1, c)));
        }
    });

    // Cells by binned p_j p_k; observed joint clicks vs sum of p_j p_k.
    const int cells = 10;
    std::vector<double> observed(cells, 0.0), expected(cells, 0.0), variance(cells, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double q = pj[k] * pk[k];
        const int cell = std::min(cells - 1, static_cast<int>(q * cells));
        observed[cell] += (ps.bit(k, 0) && ps.bit(k, 1)) ? 1.0 : 0.0;
        expected[cell] += q;
        variance[cell] += q * (1.0 - q);
    }
    double chi2 = 0.0;
    std::size_t dof = 0;
    for (int c = 0; c < cells; ++c) {
        if (variance[c] > 5.0) {
            chi2 += (observed[c] - expected[c]) * (observed[c] - expected[c]) / variance[c];
            ++dof;
        }
    }
    REQUIRE(dof >= 3);
    CHECK(std::abs(z_statistic(chi2, dof)) < 3.5);
}

TEST_CASE("multinomial synthesis")
{
    GcpEstimate g;
    g.lattice = Lattice({4});
    g.values = {0.1, 0.2, -0.001, 0.701};
    g.errors.assign(4, 0.0);
    const auto c = synthesize_counts(g, 100000, 4);
    CHECK(std::accumulate(c.counts.begin(), c.counts.end(), std::uint64_t{0}) == 100000);
    CHECK(c.counts[2] == 0);
    CHECK(testing::pull(c.probability(1), 0.2 / 1.001, std::sqrt(0.2 * 0.8 / 100000)) < 4.0);
    CHECK(synthesize_counts(g, 100000, 4).counts == c.counts);
    CHECK(synthesize_counts(g, 100000, 5).counts != c.counts);
}

TEST_CASE("permutation test")
{
    const auto model = testing::squashed(4, 0.5);
    const auto net = random_lossy_network(4, 4, 0.9, 8);
    const auto ps = generate_fakes(model, net, 200000, 40);
    SimulationSetup theory;
    theory.model = model;
    theory.network = net;
    theory.n_s = 25000;
    theory.n_r = 8;
    theory.seed = 41;
    const auto spec = BinningSpec::equal_split(4, 2);

    const std::vector<std::vector<std::size_t>> identity = {{0, 1, 2, 3}};
    const auto same = permutation_test(theory, ps, spec, identity);
    const auto direct = chi_square(Simulation(theory).gcp(spec), bin_patterns(ps, spec));
    CHECK(same.reports.size() == 1);
    CHECK(same.reports[0].chi2 == direct.chi2);
    CHECK(same.mean_z == direct.z);

    const auto result = permutation_test(theory, ps, spec, 10, 5);
    CHECK(result.reports.size() == 10);
    CHECK(result.permutations.size() == 10);
    CHECK(std::abs(result.mean_z) <= 3.0);
    CHECK_THROWS_AS(permutation_test(theory, ps, spec, 0, 5), ConfigError);
}
