#include "gbsval/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "gbsval/errors.hpp"
#include "gbsval/simulation.hpp"
#include "gbsval/summation.hpp"

namespace gbsval {

double BinComparison::sigma() const
{
    return std::sqrt(sigma_t * sigma_t + sigma_e * sigma_e);
}

double BinComparison::normalized_difference() const
{
    return gbsval::normalized_difference(theory, experiment, sigma());
}

double normalized_difference(double theory, double experiment, double sigma)
{
    const double diff = theory - experiment;
    if (sigma > 0.0) {
        return diff / sigma;
    }
    if (diff == 0.0) {
        return 0.0;
    }
    return diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

double z_statistic(double chi2, std::size_t k)
{
    if (k == 0) {
        throw NumericalError("Z-statistic needs at least one valid bin");
    }
    if (!(chi2 >= 0.0)) {
        throw NumericalError("chi-square must be non-negative");
    }
    const double v = 2.0 / (9.0 * static_cast<double>(k));
    return (std::cbrt(chi2 / static_cast<double>(k)) - (1.0 - v)) / std::sqrt(v);
}

ComparisonReport summarize_bins(std::vector<BinComparison> bins, std::uint64_t n_samples)
{
    ComparisonReport report;
    report.n_samples = n_samples;
    CompensatedSum chi2;
    for (const auto& b : bins) {
        if (!b.valid) {
            continue;
        }
        const double s2 = b.sigma_t * b.sigma_t + b.sigma_e * b.sigma_e;
        if (!(s2 > 0.0) || !std::isfinite(s2)) {
            throw NumericalError("bin " + std::to_string(b.bin) + " has no usable error estimate");
        }
        const double diff = b.theory - b.experiment;
        chi2.add(diff * diff / s2);
        ++report.k;
    }
    if (report.k == 0) {
        throw NumericalError("no valid bins (every bin has at most " + std::to_string(kValidBinThreshold) +
                             " counts)");
    }
    report.chi2 = chi2.value();
    report.chi2_over_k = report.chi2 / static_cast<double>(report.k);
    report.z = z_statistic(report.chi2, report.k);
    report.per_bin = std::move(bins);
    return report;
}

namespace {

std::vector<BinComparison> compare_bins(const GcpEstimate& theory, const BinnedCounts& counts)
{
    if (!(theory.lattice == counts.lattice)) {
        throw DataError("theory and counts are on different binning lattices");
    }
    if (counts.n_samples == 0) {
        throw DataError("counts contain no samples");
    }
    const auto ne = static_cast<double>(counts.n_samples);
    std::vector<BinComparison> bins(theory.lattice.size());
    for (std::size_t i = 0; i < bins.size(); ++i) {
        auto& b = bins[i];
        b.bin = i;
        b.theory = theory.values[i];
        b.experiment = counts.probability(i);
        b.sigma_t = theory.errors[i];
        // Theory mean stands in for the true probability.
        b.sigma_e = std::sqrt(std::max(theory.values[i], 0.0) / ne);
        b.count = counts.counts[i];
        b.valid = b.count > kValidBinThreshold;
    }
    return bins;
}

} // namespace

ComparisonReport chi_square(const GcpEstimate& theory, const BinnedCounts& counts)
{
    return summarize_bins(compare_bins(theory, counts), counts.n_samples);
}

std::vector<NormalizedDifference> normalized_difference(const GcpEstimate& theory, const BinnedCounts& counts)
{
    const auto bins = compare_bins(theory, counts);
    std::vector<NormalizedDifference> out(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double s = bins[i].sigma();
        out[i].value = bins[i].normalized_difference();
        out[i].band = s > 0.0 ? bins[i].sigma_t / s : 0.0;
    }
    return out;
}

void write_report_csv(std::ostream& out, const ComparisonReport& report)
{
    out << "# n_samples=" << report.n_samples << '\n';
    out << "bin,theory,experiment,sigma_T,sigma_E,norm_diff\n" << std::setprecision(17);
    for (const auto& b : report.per_bin) {
        out << b.bin << ',' << b.theory << ',' << b.experiment << ',' << b.sigma_t << ',' << b.sigma_e << ','
            << b.normalized_difference() << '\n';
    }
    out << "chi2,k,chi2_over_k,Z\n";
    out << report.chi2 << ',' << report.k << ',' << report.chi2_over_k << ',' << report.z << '\n';
}

ComparisonReport read_report_csv(std::istream& in)
{
    ComparisonReport report;
    std::string line;
    enum class Section { Preamble, Bins, SummaryHeader, Done } section = Section::Preamble;
    std::size_t line_no = 0;
    auto fields_of = [&](const std::string& l) {
        std::vector<std::string> f;
        std::string item;
        std::istringstream ss(l);
        while (std::getline(ss, item, ',')) {
            f.push_back(item);
        }
        return f;
    };
    auto number = [&](const std::string& s) {
        try {
            return std::stod(s);
        } catch (const std::exception&) {
            throw DataError("report CSV line " + std::to_string(line_no) + ": invalid number '" + s + "'");
        }
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            const std::string key = "# n_samples=";
            if (line.rfind(key, 0) == 0) {
                report.n_samples = std::stoull(line.substr(key.size()));
            }
            continue;
        }
        if (section == Section::Preamble) {
            if (line != "bin,theory,experiment,sigma_T,sigma_E,norm_diff") {
                throw DataError("report CSV has an unexpected header");
            }
            section = Section::Bins;
            continue;
        }
        if (section == Section::Bins && line == "chi2,k,chi2_over_k,Z") {
            section = Section::SummaryHeader;
            continue;
        }
        const auto f = fields_of(line);
        if (section == Section::Bins) {
            if (f.size() != 6) {
                throw DataError("report CSV line " + std::to_string(line_no) + ": expected 6 fields");
            }
            BinComparison b;
            b.bin = static_cast<std::size_t>(number(f[0]));
            b.theory = number(f[1]);
            b.experiment = number(f[2]);
            b.sigma_t = number(f[3]);
            b.sigma_e = number(f[4]);
            if (report.n_samples) {
                b.count = static_cast<std::uint64_t>(std::llround(b.experiment * static_cast<double>(report.n_samples)));
                b.valid = b.count > kValidBinThreshold;
            }
            report.per_bin.push_back(b);
        } else if (section == Section::SummaryHeader) {
            if (f.size() != 4) {
                throw DataError("report CSV summary must have 4 fields");
            }
            report.chi2 = number(f[0]);
            report.k = static_cast<std::size_t>(number(f[1]));
            report.chi2_over_k = number(f[2]);
            report.z = number(f[3]);
            section = Section::Done;
        } else {
            throw DataError("report CSV has trailing content at line " + std::to_string(line_no));
        }
    }
    if (section != Section::Done) {
        throw DataError("report CSV is missing its summary line");
    }
    return report;
}

double FitGrid::t_at(std::size_t i) const
{
    return t_steps <= 1 ? t_min : t_min + (t_max - t_min) * static_cast<double>(i) / static_cast<double>(t_steps - 1);
}

double FitGrid::eps_at(std::size_t i) const
{
    return eps_steps <= 1 ? eps_min
                          : eps_min + (eps_max - eps_min) * static_cast<double>(i) / static_cast<double>(eps_steps - 1);
}

double FitGrid::t_spacing() const
{
    return t_steps <= 1 ? 0.0 : (t_max - t_min) / static_cast<double>(t_steps - 1);
}

double FitGrid::eps_spacing() const
{
    return eps_steps <= 1 ? 0.0 : (eps_max - eps_min) / static_cast<double>(eps_steps - 1);
}

ComparisonReport total_count_comparison(const BinnedCounts& counts, const InputModel& base,
                                        const TransmissionMatrix& network, double t, double epsilon,
                                        const FitSettings& settings)
{
    SimulationSetup setup;
    setup.model = base;
    setup.model.family = StateFamily::ThermalizedSqueezed;
    setup.model.ordering = Ordering::Normal;
    setup.model.t = t;
    setup.model.epsilon = epsilon;
    setup.network = network;
    setup.n_s = settings.n_s;
    setup.n_r = settings.n_r;
    setup.seed = settings.seed;
    const Simulation sim(std::move(setup));
    return chi_square(sim.gcp(BinningSpec::total(sim.output_modes())), counts);
}

namespace {

// Golden-section minimization of f on [lo, hi] down to width `tol`.
double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol, double& best_value)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if (fc <= fd) {
        best_value = fc;
        return c;
    }
    best_value = fd;
    return d;
}

} // namespace

FitResult fit_decoherence(const BinnedCounts& counts, const InputModel& base, const TransmissionMatrix& network,
                          const FitGrid& grid, const FitSettings& settings)
{
    if (grid.t_steps == 0 || grid.eps_steps == 0) {
        throw ConfigError("fit grid is empty");
    }
    if (!(grid.t_min > 0.0) || grid.t_max < grid.t_min || grid.eps_min < 0.0 || grid.eps_max > 1.0 ||
        grid.eps_max < grid.eps_min) {
        throw ConfigError("fit grid ranges need 0 < t_min <= t_max and 0 <= eps_min <= eps_max <= 1");
    }
    if (counts.lattice.dimension() != 1 || counts.lattice.size() != network.outputs() + 1) {
        throw DataError("fitting needs total-count (d = 1, all modes) counts");
    }

    FitResult result;
    auto objective = [&](double t, double eps) {
        ++result.evaluations;
        return total_count_comparison(counts, base, network, t, eps, settings).chi2;
    };

    // Grid search; ties go to the point nearest (t, eps) = (1, 0).
    std::size_t best_i = 0, best_j = 0;
    double best = std::numeric_limits<double>::infinity();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.t_steps; ++i) {
        for (std::size_t j = 0; j < grid.eps_steps; ++j) {
            const double t = grid.t_at(i), eps = grid.eps_at(j);
            const double value = objective(t, eps);
            const double dist = std::hypot(t - 1.0, eps);
            if (value < best || (value == best && dist < best_dist)) {
                best = value;
                best_dist = dist;
                best_i = i;
                best_j = j;
            }
        }
    }
    double t_best = grid.t_at(best_i);
    double eps_best = grid.eps_at(best_j);

    const bool t_edge = grid.t_steps > 1 && (best_i == 0 || best_i + 1 == grid.t_steps);
    const bool eps_edge = grid.eps_steps > 1 && ((best_j == 0 && grid.eps_min > 0.0) ||
                                                 (best_j + 1 == grid.eps_steps && grid.eps_max < 1.0));
    result.on_boundary = t_edge || eps_edge;

    if (!result.on_boundary) {
        const double t_lo = std::max(grid.t_min, t_best - grid.t_spacing());
        const double t_hi = std::min(grid.t_max, t_best + grid.t_spacing());
        const double e_lo = std::max(grid.eps_min, eps_best - grid.eps_spacing());
        const double e_hi = std::min(grid.eps_max, eps_best + grid.eps_spacing());
        const double tol = kFitResolution / 5.0;
        for (std::size_t cycle = 0; cycle < settings.refine_cycles; ++cycle) {
            double value = best;
            if (t_hi > t_lo) {
                const double t = golden_section([&](double x) { return objective(x, eps_best); }, t_lo, t_hi, tol, value);
                if (value < best) {
                    best = value;
                    t_best = t;
                }
            }
            if (e_hi > e_lo) {
                const double e = golden_section([&](double x) { return objective(t_best, x); }, e_lo, e_hi, tol, value);
                if (value < best) {
                    best = value;
                    eps_best = e;
                }
            }
        }
    }

    result.t = t_best;
    result.epsilon = eps_best;
    result.report = total_count_comparison(counts, base, network, t_best, eps_best, settings);
    for (double dt : {-kFitResolution, kFitResolution}) {
        for (double de : {-kFitResolution, kFitResolution}) {
            const double eps = std::clamp(eps_best + de, 0.0, 1.0);
            result.corner_z.push_back(total_count_comparison(counts, base, network, t_best + dt, eps, settings).z);
        }
    }
    return result;
}

} // namespace gbsval
