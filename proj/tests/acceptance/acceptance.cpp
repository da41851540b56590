// Acceptance criteria 1-7. Prints one PASS/FAIL line per criterion.
// Usage: acceptance [criterion...]   (no arguments runs all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "gbsval/cli/commands.hpp"
#include "gbsval/cli/config.hpp"
#include "gbsval/counts.hpp"
#include "gbsval/lattice.hpp"
#include "gbsval/oracle.hpp"
#include "gbsval/rng.hpp"
#include "gbsval/simulation.hpp"
#include "gbsval/statistics.hpp"

using namespace gbsval;

namespace {

// Tolerances.
constexpr double kZTableTolerance = 1.0;      // criterion 1
constexpr double kPullBound = 3.0;            // criteria 2, 3, 7
constexpr double kOracleNormTolerance = 1e-8; // criterion 3
constexpr double kOrderOneRatio = 0.1;        // criterion 4: "O(1)" means sigma_T / G >= 0.1
constexpr double kPositivePCeiling = 0.1;     // criterion 4
constexpr double kSelfConsistencyZ = 3.0;     // criterion 5
constexpr double kFitTolerance = 0.005;       // criterion 6
constexpr double kMarginalTolerance = 1e-10;  // criterion 7

// Sample sizes. E_S = 10^6 everywhere the criteria fix it.
constexpr std::size_t kEnsemble = 1000000;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof(buf), format, a, b, c, d);
    return buf;
}

SimulationSetup setup(InputModel model, TransmissionMatrix network, std::size_t n_r, std::uint64_t seed)
{
    SimulationSetup s;
    s.model = std::move(model);
    s.network = std::move(network);
    s.n_r = n_r;
    s.n_s = kEnsemble / n_r;
    s.seed = seed;
    return s;
}

InputModel squeezed(std::vector<double> r)
{
    InputModel m;
    m.r = std::move(r);
    return m;
}

Outcome criterion1()
{
    struct Row {
        double chi2_over_k;
        std::size_t k;
        double z;
    };
    const Row rows[] = {{218, 53, 78}, {143, 31, 50}, {1861, 85, 221}, {215, 74, 91},
                        {171, 57, 72}, {193, 40, 64}, {151, 28, 49}};
    Outcome o{true, ""};
    double worst = 0.0;
    for (const auto& r : rows) {
        const double z = z_statistic(r.chi2_over_k * static_cast<double>(r.k), r.k);
        worst = std::max(worst, std::abs(z - r.z));
    }
    o.pass = worst <= kZTableTolerance;
    o.detail = fmt("7 rows, max |Z - Z_table| = %.3f (tol %.1f)", worst, kZTableTolerance);
    return o;
}

Outcome criterion2()
{
    const auto pure = Simulation(setup(squeezed({1.0}), TransmissionMatrix::identity(1), 16, 2))
                          .gcp(BinningSpec::total(1));
    InputModel sq = squeezed({squeezing_for_photon_number(0.5)});
    sq.family = StateFamily::Squashed;
    const auto squashed = Simulation(setup(sq, TransmissionMatrix::identity(1), 16, 2)).gcp(BinningSpec::total(1));
    const double pull_pure = std::abs(pure.values[0] - 1.0 / std::cosh(1.0)) / pure.errors[0];
    const double pull_sq = std::abs(squashed.values[0] - std::sqrt(0.5)) / squashed.errors[0];
    return {pull_pure <= kPullBound && pull_sq <= kPullBound,
            fmt("pure <pi(0)> = %.5f (pull %.2f), squashed <pi(0)> = %.5f (pull %.2f)", pure.values[0], pull_pure,
                squashed.values[0], pull_sq)};
}

Outcome criterion3()
{
    struct Case {
        std::size_t modes, inputs;
    };
    const Case cases[] = {{2, 1}, {3, 2}, {4, 2}, {4, 1}, {4, 2}};
    rng::StreamEngine draw(rng::stream_key(3, "acceptance"), 0);
    double worst_pull = 0.0, worst_norm = 0.0;
    std::size_t bins = 0;
    for (std::size_t c = 0; c < 5; ++c) {
        const auto [m, n] = cases[c];
        const double transmission = 0.5 + 0.45 * draw.uniform();
        std::vector<double> r(n);
        for (auto& x : r) {
            x = 0.5 + 0.7 * draw.uniform();
        }
        const auto net = random_lossy_network(m, n, transmission, 100 + c);
        const auto model = squeezed(r);
        const auto cov = output_covariance(model, net);
        const auto dist = exact_pattern_distribution(cov);
        worst_norm = std::max(worst_norm, std::abs(std::accumulate(dist.begin(), dist.end(), 0.0) - 1.0));

        BinningSpec halves;
        halves.subsets.resize(2);
        for (std::size_t j = 0; j < m; ++j) {
            halves.subsets[j < m / 2 ? 0 : 1].push_back(j);
        }
        // Many repeats so that sigma_T itself is well determined.
        const Simulation sim(setup(model, net, 250, 200 + c));
        for (const auto& spec : {BinningSpec::total(m), halves}) {
            const auto mc = sim.gcp(spec);
            const auto exact = exact_gcp(cov, spec);
            for (std::size_t b = 0; b < mc.values.size(); ++b) {
                worst_pull = std::max(worst_pull, std::abs(mc.values[b] - exact.values[b]) / mc.errors[b]);
                ++bins;
            }
        }
    }
    return {worst_pull <= kPullBound && worst_norm <= kOracleNormTolerance,
            fmt("%.0f bins, max |G - G_exact| / sigma_T = %.2f; max |sum P - 1| = %.1e", static_cast<double>(bins),
                worst_pull, worst_norm)};
}

Outcome criterion4()
{
    const std::size_t m = 20;
    const int orders[] = {2, 4, 6, 8};
    double ratio[3][4];
    const Ordering orderings[] = {Ordering::Normal, Ordering::Symmetric, Ordering::Antinormal};
    for (int o = 0; o < 3; ++o) {
        InputModel model = squeezed(std::vector<double>(m, 1.0));
        model.ordering = orderings[o];
        // Same seed for all orderings: common random numbers.
        const Simulation sim(setup(model, TransmissionMatrix::identity(m), 100, 1));
        for (int i = 0; i < 4; ++i) {
            std::vector<int> c(m, 0);
            std::fill(c.begin(), c.begin() + orders[i], 1);
            const double exact = std::pow(std::sinh(1.0), 2 * orders[i]);
            ratio[o][i] = sim.intensity_correlation(c).error / exact;
        }
    }
    bool ordered = true;
    for (int i = 0; i < 4; ++i) {
        ordered = ordered && ratio[0][i] < ratio[1][i] && ratio[1][i] < ratio[2][i];
    }
    const bool q6 = ratio[2][2] >= kOrderOneRatio;
    const bool w8 = ratio[1][3] >= kOrderOneRatio;
    const bool p8 = ratio[0][3] < kPositivePCeiling;
    std::ostringstream d;
    d << "sigma_T/G at n=2,4,6,8:";
    const char* names[] = {" P", " W", " Q"};
    for (int o = 0; o < 3; ++o) {
        d << names[o];
        for (int i = 0; i < 4; ++i) {
            d << (i ? "," : "=") << fmt("%.4f", ratio[o][i]);
        }
    }
    d << "; ordered " << (ordered ? "yes" : "no") << ", Q(6)>=0.1 " << (q6 ? "yes" : "no") << ", W(8)>=0.1 "
      << (w8 ? "yes" : "no") << ", P(8)<0.1 " << (p8 ? "yes" : "no");
    return {ordered && q6 && w8 && p8, d.str()};
}

Outcome criterion5()
{
    const std::size_t m = 16, n = 8;
    rng::StreamEngine draw(rng::stream_key(5, "acceptance"), 0);
    InputModel model;
    model.family = StateFamily::Squashed;
    for (std::size_t j = 0; j < n; ++j) {
        model.r.push_back(0.5 + draw.uniform());
    }
    const auto net = random_lossy_network(m, n, 0.9, 55);
    const auto fakes = generate_fakes(model, net, kEnsemble, 501);
    const Simulation sim(setup(model, net, 16, 502));
    double z[2];
    std::size_t k[2];
    int i = 0;
    for (std::size_t d : {1, 2}) {
        const auto spec = BinningSpec::equal_split(m, d);
        const auto report = chi_square(sim.gcp(spec), bin_patterns(fakes, spec));
        z[i] = report.z;
        k[i] = report.k;
        ++i;
    }
    return {std::abs(z[0]) <= kSelfConsistencyZ && std::abs(z[1]) <= kSelfConsistencyZ,
            fmt("d=1: Z = %.2f (k=%.0f); d=2: Z = %.2f (k=%.0f)", z[0], static_cast<double>(k[0]), z[1],
                static_cast<double>(k[1]))};
}

Outcome criterion6()
{
    const std::size_t m = 16, n = 8;
    InputModel truth = squeezed(std::vector<double>(n, 1.0));
    truth.family = StateFamily::ThermalizedSqueezed;
    truth.epsilon = 0.04;
    truth.t = 1.0;
    const auto net = random_lossy_network(m, n, 0.9, 66);

    // Counts: multinomial draw of 10^6 samples from a 4x larger independent ensemble.
    SimulationSetup big = setup(truth, net, 16, 601);
    big.n_s *= 4;
    const auto source = Simulation(big).gcp(BinningSpec::total(m));
    const auto counts = synthesize_counts(source, kEnsemble, 602);

    InputModel base = truth;
    base.epsilon = 0.0;
    FitGrid grid;
    grid.t_min = 0.98;
    grid.t_max = 1.02;
    grid.t_steps = 5;
    grid.eps_min = 0.0;
    grid.eps_max = 0.08;
    grid.eps_steps = 9;
    FitSettings settings;
    settings.n_s = kEnsemble / 16;
    settings.n_r = 16;
    settings.seed = 603;
    const auto fit = fit_decoherence(counts, base, net, grid, settings);
    const bool pass = !fit.on_boundary && std::abs(fit.t - 1.0) <= kFitTolerance &&
                      std::abs(fit.epsilon - 0.04) <= kFitTolerance;
    return {pass, fmt("t* = %.4f, eps* = %.4f (tol %.3f), Z at optimum = %.2f", fit.t, fit.epsilon, kFitTolerance,
                      fit.report.z)};
}

std::string file_body(const std::filesystem::path& path)
{
    std::ifstream in(path);
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.rfind("# created:", 0) != 0) {
            out += line + '\n';
        }
    }
    return out;
}

Outcome criterion7()
{
    const std::size_t m = 8;
    const auto net = random_lossy_network(m, 4, 0.85, 77);
    const Simulation sim(setup(squeezed({0.8, 1.0, 1.2, 0.9}), net, 16, 7));
    const auto g1 = sim.gcp(BinningSpec::total(m));
    const auto g2 = sim.gcp(BinningSpec::equal_split(m, 2));

    double err2 = 0.0;
    for (double e : g2.errors) {
        err2 += e * e;
    }
    const double norm_pull = std::abs(g2.total() - 1.0) / std::sqrt(err2);
    const bool normalized = norm_pull <= kPullBound;

    double worst_marginal = 0.0;
    for (std::size_t total = 0; total <= m; ++total) {
        double s = 0.0;
        for (std::size_t a = 0; a <= m / 2; ++a) {
            if (total >= a && total - a <= m / 2) {
                const std::vector<std::size_t> c = {a, total - a};
                s += g2.values[g2.lattice.index(c)];
            }
        }
        worst_marginal = std::max(worst_marginal, std::abs(s - g1.values[total]));
    }
    const bool marginal = worst_marginal <= kMarginalTolerance;
    const bool counts = bin_count(BinningSpec::equal_split(144, 2)) == 5329 && permutation_count(4, 2) == 3;

    const auto root = std::filesystem::temp_directory_path() / "gbsval_acceptance_replay";
    std::filesystem::remove_all(root);
    std::string bodies[2];
    for (int run = 0; run < 2; ++run) {
        cli::ConfigMap map;
        map.set("r", "1.0", "acceptance");
        map.set("modes", "6", "acceptance");
        map.set("matrix", "identity", "acceptance");
        map.set("n_s", "20000", "acceptance");
        map.set("n_r", "8", "acceptance");
        map.set("d", "2", "acceptance");
        map.set("seed", "4242", "acceptance");
        map.set("out", (root / std::to_string(run)).string(), "acceptance");
        const auto files = cli::cmd_simulate(cli::build_run_config(map));
        bodies[run] = file_body(files.at(0));
    }
    std::filesystem::remove_all(root);
    const bool replay = !bodies[0].empty() && bodies[0] == bodies[1];

    std::ostringstream d;
    d << fmt("sum G = %.12f (pull %.2g), max marginal gap %.1e", g2.total(), norm_pull, worst_marginal)
      << ", bin_count(144,2) = " << bin_count(BinningSpec::equal_split(144, 2))
      << ", permutation_count(4,2) = " << permutation_count(4, 2) << ", replay identical " << (replay ? "yes" : "no");
    return {normalized && marginal && counts && replay, d.str()};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"Z-statistic table reproduction", criterion1},
        {"single-mode closed forms", criterion2},
        {"oracle equivalence at small M", criterion3},
        {"sigma-ordering scaling study (M=20)", criterion4},
        {"classical fake self-consistency", criterion5},
        {"closed-loop decoherence fit", criterion6},
        {"structural invariants", criterion7},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.push_back(std::atoi(argv[i]));
    }
    if (selected.empty()) {
        for (int i = 1; i <= 7; ++i) {
            selected.push_back(i);
        }
    }
    int failures = 0;
    for (int id : selected) {
        if (id < 1 || id > 7) {
            std::fprintf(stderr, "unknown criterion %d\n", id);
            return 2;
        }
        const auto& [name, run] = criteria[static_cast<std::size_t>(id - 1)];
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %d %s: %s [%s] (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(),
                    secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
