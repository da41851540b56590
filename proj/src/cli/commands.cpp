#include "gbsval/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "gbsval/counts.hpp"
#include "gbsval/errors.hpp"
#include "gbsval/kernels.hpp"
#include "gbsval/oracle.hpp"
#include "gbsval/rng.hpp"
#include "gbsval/simulation.hpp"
#include "gbsval/statistics.hpp"
#include "gbsval/version.hpp"

namespace gbsval::cli {

namespace {

std::string timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

std::ofstream open_output(const RunConfig& config, const std::string& name, Outputs& outputs,
                          std::ios::openmode mode = std::ios::out)
{
    std::filesystem::create_directories(config.out);
    const auto path = config.out / name;
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    outputs.push_back(path);
    return out;
}

void write_header(std::ostream& out, const std::string& command, const RunConfig& config,
                  const std::vector<std::string>& extra = {})
{
    out << "# gbsval " << kVersion << ' ' << command << '\n';
    out << "# created: " << timestamp() << '\n';
    for (const auto& line : config.echo()) {
        out << "# " << line << '\n';
    }
    for (const auto& line : extra) {
        out << "# " << line << '\n';
    }
}

SimulationSetup make_setup(const RunConfig& config, TransmissionMatrix network)
{
    SimulationSetup s;
    s.model = config.model;
    s.network = std::move(network);
    s.n_s = config.n_s;
    s.n_r = config.n_r;
    s.seed = config.seed;
    s.chunk = config.chunk;
    return s;
}

const std::filesystem::path& require_path(const std::optional<std::filesystem::path>& p, const char* key,
                                          const char* command)
{
    if (!p) {
        throw ConfigError(std::string(command) + " needs '" + key + "'");
    }
    return *p;
}

BinnedCounts load_counts(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open counts file " + path.string());
    }
    return read_counts_csv(in);
}

GcpEstimate load_gcp(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open theory file " + path.string());
    }
    return read_gcp_csv(in);
}

std::string join_perm(const std::vector<std::size_t>& perm)
{
    std::ostringstream ss;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        ss << (i ? " " : "") << perm[i];
    }
    return ss.str();
}

} // namespace

Outputs cmd_simulate(const RunConfig& config)
{
    const TransmissionMatrix network = resolve_network(config);
    const Simulation sim(make_setup(config, network));
    const BinningSpec spec = resolve_binning(config, sim.output_modes());
    Outputs outputs;
    const GcpEstimate gcp = sim.gcp(spec);
    {
        auto out = open_output(config, "gcp.csv", outputs);
        write_header(out, "simulate", config, {"clamped = " + std::to_string(gcp.clamped)});
        write_gcp_csv(out, gcp);
    }
    if (!config.correlation_orders.empty()) {
        auto out = open_output(config, "correlations.csv", outputs);
        write_header(out, "simulate", config);
        out << "n,mean,error,exact\n" << std::setprecision(17);
        const bool identity = network.is_identity();
        for (int n : config.correlation_orders) {
            std::vector<int> orders(sim.output_modes(), 0);
            std::vector<std::size_t> modes;
            for (int j = 0; j < n; ++j) {
                orders[static_cast<std::size_t>(j)] = 1;
                modes.push_back(static_cast<std::size_t>(j));
            }
            const Estimate e = sim.intensity_correlation(orders);
            const double exact = identity ? exact_identity_correlation(config.model, network, modes)
                                          : std::nan("");
            out << n << ',' << e.mean << ',' << e.error << ',' << exact << '\n';
        }
    }
    return outputs;
}

Outputs cmd_fake(const RunConfig& config)
{
    const std::size_t n_fake = config.n_fake ? config.n_fake : config.ensemble_size();
    const PatternSet ps = generate_fakes(config.model, resolve_network(config), n_fake, config.seed);
    Outputs outputs;
    if (config.pattern_format == "packed") {
        {
            auto out = open_output(config, "fakes.gbsp", outputs, std::ios::out | std::ios::binary);
            write_patterns_packed(out, ps);
        }
        auto meta = open_output(config, "fakes.gbsp.txt", outputs);
        write_header(meta, "fake", config, {"n_fake = " + std::to_string(n_fake)});
    } else {
        auto out = open_output(config, "fakes.txt", outputs);
        write_header(out, "fake", config, {"n_fake = " + std::to_string(n_fake)});
        write_patterns_text(out, ps);
    }
    return outputs;
}

Outputs cmd_bin(const RunConfig& config)
{
    const PatternSet ps = ingest_patterns(require_path(config.patterns, "patterns", "bin"));
    const BinningSpec spec = resolve_binning(config, ps.modes());
    std::vector<std::string> extra = {"patterns = " + config.patterns->string()};
    BinnedCounts counts;
    if (config.perm_seed) {
        const auto perm = rng::random_permutation(ps.modes(), *config.perm_seed, 0);
        extra.push_back("perm_seed = " + std::to_string(*config.perm_seed));
        extra.push_back("perm = " + join_perm(perm));
        counts = bin_patterns(ps, spec, std::span<const std::size_t>(perm));
    } else {
        counts = bin_patterns(ps, spec);
    }
    Outputs outputs;
    auto out = open_output(config, "counts.csv", outputs);
    write_header(out, "bin", config, extra);
    write_counts_csv(out, counts);
    return outputs;
}

Outputs cmd_compare(const RunConfig& config)
{
    const auto& theory_path = require_path(config.theory, "theory", "compare");
    const auto& counts_path = require_path(config.counts, "counts", "compare");
    const ComparisonReport report = chi_square(load_gcp(theory_path), load_counts(counts_path));
    Outputs outputs;
    auto out = open_output(config, "report.csv", outputs);
    std::vector<std::string> extra = {"theory = " + theory_path.string(), "counts = " + counts_path.string()};
    if (!report.z_reliable()) {
        extra.push_back("warning: k < 10, Z is unreliable");
    }
    if (report.extreme()) {
        extra.push_back("warning: Z > 6, extremely unlikely under the model");
    }
    write_header(out, "compare", config, extra);
    write_report_csv(out, report);
    return outputs;
}

Outputs cmd_permtest(const RunConfig& config)
{
    const PatternSet ps = ingest_patterns(require_path(config.patterns, "patterns", "permtest"));
    const SimulationSetup setup = make_setup(config, resolve_network(config));
    const BinningSpec spec = resolve_binning(config, ps.modes());
    const std::uint64_t perm_seed = config.perm_seed.value_or(config.seed);
    const PermutationTestResult result = permutation_test(setup, ps, spec, config.trials, perm_seed);
    Outputs outputs;
    auto out = open_output(config, "permtest.csv", outputs);
    write_header(out, "permtest", config,
                 {"patterns = " + config.patterns->string(), "perm_seed = " + std::to_string(perm_seed),
                  "trials = " + std::to_string(config.trials)});
    out << "trial,chi2,k,chi2_over_k,Z,perm\n" << std::setprecision(17);
    for (std::size_t i = 0; i < result.reports.size(); ++i) {
        const auto& r = result.reports[i];
        out << i << ',' << r.chi2 << ',' << r.k << ',' << r.chi2_over_k << ',' << r.z << ','
            << join_perm(result.permutations[i]) << '\n';
    }
    out << "mean_Z\n" << result.mean_z << '\n';
    return outputs;
}

Outputs cmd_fit(const RunConfig& config)
{
    const TransmissionMatrix network = resolve_network(config);
    BinnedCounts counts;
    std::string source;
    if (config.counts) {
        counts = load_counts(*config.counts);
        source = "counts = " + config.counts->string();
    } else {
        const PatternSet ps = ingest_patterns(require_path(config.patterns, "patterns", "fit"));
        counts = bin_patterns(ps, BinningSpec::total(ps.modes()));
        source = "patterns = " + config.patterns->string();
    }
    FitSettings settings;
    settings.n_s = config.n_s;
    settings.n_r = config.n_r;
    settings.seed = config.seed;
    const FitResult fit = fit_decoherence(counts, config.model, network, config.grid, settings);

    std::ostringstream grid;
    grid << std::setprecision(17) << "grid = t " << config.grid.t_min << ".." << config.grid.t_max << " x "
         << config.grid.t_steps << ", eps " << config.grid.eps_min << ".." << config.grid.eps_max << " x "
         << config.grid.eps_steps;
    Outputs outputs;
    {
        auto out = open_output(config, "fit.csv", outputs);
        write_header(out, "fit", config, {source, grid.str()});
        out << "t,epsilon,resolution,chi2,k,chi2_over_k,Z,Z_corner_min,Z_corner_max,on_boundary,evaluations\n"
            << std::setprecision(17);
        const auto [zmin, zmax] = std::minmax_element(fit.corner_z.begin(), fit.corner_z.end());
        out << fit.t << ',' << fit.epsilon << ',' << fit.resolution << ',' << fit.report.chi2 << ',' << fit.report.k
            << ',' << fit.report.chi2_over_k << ',' << fit.report.z << ',' << *zmin << ',' << *zmax << ','
            << (fit.on_boundary ? 1 : 0) << ',' << fit.evaluations << '\n';
    }
    auto out = open_output(config, "fit_report.csv", outputs);
    write_header(out, "fit", config, {source});
    write_report_csv(out, fit.report);
    return outputs;
}

Outputs cmd_oracle(const RunConfig& config)
{
    const TransmissionMatrix network = resolve_network(config);
    const OutputCovariance cov = output_covariance(config.model, network);
    const BinningSpec spec = resolve_binning(config, cov.modes());
    const GcpEstimate gcp = exact_gcp(cov, spec);
    Outputs outputs;
    auto out = open_output(config, "oracle_gcp.csv", outputs);
    write_header(out, "oracle", config);
    write_gcp_csv(out, gcp);
    return outputs;
}

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names = {"simulate", "fake", "bin", "compare", "permtest", "fit", "oracle"};
    return names;
}

Outputs run_command(const std::string& name, const RunConfig& config)
{
    if (config.threads > 0) {
        kernels::set_threads(config.threads);
    }
    if (name == "simulate") {
        return cmd_simulate(config);
    }
    if (name == "fake") {
        return cmd_fake(config);
    }
    if (name == "bin") {
        return cmd_bin(config);
    }
    if (name == "compare") {
        return cmd_compare(config);
    }
    if (name == "permtest") {
        return cmd_permtest(config);
    }
    if (name == "fit") {
        return cmd_fit(config);
    }
    if (name == "oracle") {
        return cmd_oracle(config);
    }
    throw ConfigError("unknown command '" + name + "'");
}

} // namespace gbsval::cli
