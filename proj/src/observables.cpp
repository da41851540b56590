#include "gbsval/observables.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "gbsval/errors.hpp"
#include "gbsval/kernels.hpp"

namespace gbsval {

Estimate repeat_statistics(std::span<const double> repeat_means)
{
    const std::size_t nr = repeat_means.size();
    if (nr == 0) {
        throw NumericalError("no repeats to summarize");
    }
    CompensatedSum sum;
    for (double g : repeat_means) {
        sum.add(g);
    }
    const double mean = sum.value() / static_cast<double>(nr);
    if (nr == 1) {
        return {mean, std::numeric_limits<double>::quiet_NaN()};
    }
    CompensatedSum sq;
    for (double g : repeat_means) {
        sq.add((g - mean) * (g - mean));
    }
    const double denom = static_cast<double>(nr) * static_cast<double>(nr - 1);
    return {mean, std::sqrt(sq.value() / denom)};
}

Eigen::MatrixXcd output_photon_numbers(const AmplitudeEnsemble& ens)
{
    Eigen::MatrixXcd n = ens.alpha.cwiseProduct(ens.beta);
    const double sigma = sigma_of(ens.ordering);
    if (sigma != 0.0) {
        n.array() -= sigma;
    }
    return n;
}

Eigen::MatrixXcd ClickWeights::clicks() const
{
    return (1.0 - vacuum.array()).matrix();
}

ClickWeights click_probabilities(const AmplitudeEnsemble& ens)
{
    ClickWeights w;
    w.vacuum = output_photon_numbers(ens);
    for (Eigen::Index k = 0; k < w.vacuum.cols(); ++k) {
        for (Eigen::Index j = 0; j < w.vacuum.rows(); ++j) {
            std::complex<double> n = w.vacuum(j, k);
            if (n.real() < kExponentFloor) {
                n.real(kExponentFloor);
                ++w.clamped;
            }
            w.vacuum(j, k) = std::exp(-n);
        }
    }
    return w;
}

double GcpEstimate::total() const
{
    return std::accumulate(values.begin(), values.end(), 0.0);
}

GcpEstimate finalize_gcp(const Lattice& lattice, const std::vector<std::vector<std::complex<double>>>& repeat_fourier,
                         std::size_t clamped)
{
    const std::size_t nr = repeat_fourier.size();
    GcpEstimate est;
    est.lattice = lattice;
    est.n_r = nr;
    est.clamped = clamped;
    est.values.resize(lattice.size());
    est.errors.resize(lattice.size());
    est.fourier.assign(lattice.size(), {0.0, 0.0});

    // Real part taken per repeat, after averaging its trajectories.
    std::vector<std::vector<double>> per_repeat(nr);
    for (std::size_t i = 0; i < nr; ++i) {
        const auto g = inverse_dft(lattice, repeat_fourier[i]);
        per_repeat[i].resize(g.size());
        for (std::size_t b = 0; b < g.size(); ++b) {
            per_repeat[i][b] = g[b].real();
            est.fourier[b] += repeat_fourier[i][b] / static_cast<double>(nr);
        }
    }
    std::vector<double> column(nr);
    for (std::size_t b = 0; b < lattice.size(); ++b) {
        for (std::size_t i = 0; i < nr; ++i) {
            column[i] = per_repeat[i][b];
        }
        const Estimate e = repeat_statistics(column);
        est.values[b] = e.mean;
        est.errors[b] = e.error;
    }
    return est;
}

namespace {

Eigen::Index repeat_begin(const AmplitudeEnsemble& ens, std::size_t i)
{
    return static_cast<Eigen::Index>(i * ens.n_s);
}

void check_ensemble(const AmplitudeEnsemble& ens)
{
    if (ens.n_s == 0 || ens.n_r == 0 || ens.n_s * ens.n_r != ens.trajectories()) {
        throw DataError("ensemble repeat structure does not match its trajectory count");
    }
}

} // namespace

GcpEstimate gcp(const AmplitudeEnsemble& ens, const BinningSpec& spec)
{
    check_ensemble(ens);
    spec.validate(ens.modes());
    const kernels::FourierPlan plan(spec);
    const ClickWeights weights = click_probabilities(ens);
    std::vector<std::vector<std::complex<double>>> repeat_fourier(ens.n_r);
    for (std::size_t i = 0; i < ens.n_r; ++i) {
        CompensatedComplexVector acc(plan.lattice().size());
        const Eigen::Index first = repeat_begin(ens, i);
        kernels::accumulate_fourier_parallel(plan, weights.vacuum, first, first + static_cast<Eigen::Index>(ens.n_s),
                                             acc);
        repeat_fourier[i] = acc.values();
        for (auto& z : repeat_fourier[i]) {
            z /= static_cast<double>(ens.n_s);
        }
    }
    return finalize_gcp(plan.lattice(), repeat_fourier, weights.clamped);
}

void validate_orders(std::span<const int> orders, std::size_t modes, Ordering ordering)
{
    if (orders.size() != modes) {
        throw ConfigError("correlation orders need one entry per mode (" + std::to_string(modes) + ")");
    }
    for (int c : orders) {
        if (c < 0) {
            throw ConfigError("correlation orders must be non-negative");
        }
        if (c > 1 && ordering != Ordering::Normal) {
            throw ConfigError("unsupported order: symmetric and anti-normal orderings only support c_j in {0, 1}");
        }
    }
}

Estimate intensity_correlation(const AmplitudeEnsemble& ens, std::span<const int> orders)
{
    check_ensemble(ens);
    validate_orders(orders, ens.modes(), ens.ordering);
    std::vector<std::size_t> rows;
    std::vector<int> powers;
    for (std::size_t j = 0; j < orders.size(); ++j) {
        if (orders[j] > 0) {
            rows.push_back(j);
            powers.push_back(orders[j]);
        }
    }
    const Eigen::MatrixXcd n = output_photon_numbers(ens);
    std::vector<double> means(ens.n_r);
    for (std::size_t i = 0; i < ens.n_r; ++i) {
        const Eigen::Index first = repeat_begin(ens, i);
        const auto s = kernels::product_sum_parallel(n, rows, powers, first, first + static_cast<Eigen::Index>(ens.n_s));
        means[i] = s.real() / static_cast<double>(ens.n_s);
    }
    return repeat_statistics(means);
}

void validate_distinct_modes(std::span<const std::size_t> modes, std::size_t count)
{
    std::vector<bool> seen(count, false);
    for (std::size_t m : modes) {
        if (m >= count) {
            throw ConfigError("mode index " + std::to_string(m) + " out of range");
        }
        if (seen[m]) {
            throw ConfigError("duplicate mode index " + std::to_string(m));
        }
        seen[m] = true;
    }
}

Estimate marginal_moment(const AmplitudeEnsemble& ens, std::span<const std::size_t> modes)
{
    check_ensemble(ens);
    validate_distinct_modes(modes, ens.modes());
    const Eigen::MatrixXcd clicks = click_probabilities(ens).clicks();
    const std::vector<int> powers(modes.size(), 1);
    std::vector<double> means(ens.n_r);
    for (std::size_t i = 0; i < ens.n_r; ++i) {
        const Eigen::Index first = repeat_begin(ens, i);
        const auto s = kernels::product_sum_parallel(clicks, modes, powers, first, first + static_cast<Eigen::Index>(ens.n_s));
        means[i] = s.real() / static_cast<double>(ens.n_s);
    }
    return repeat_statistics(means);
}

Cumulants finalize_cumulants(std::span<const std::complex<double>> mean_j, std::span<const std::complex<double>> mean_k,
                             std::span<const std::complex<double>> mean_jk)
{
    const std::size_t nr = mean_j.size();
    std::vector<double> k1(nr), k2(nr);
    for (std::size_t i = 0; i < nr; ++i) {
        k1[i] = mean_j[i].real();
        k2[i] = mean_jk[i].real() - mean_j[i].real() * mean_k[i].real();
    }
    return {repeat_statistics(k1), repeat_statistics(k2)};
}

Cumulants cumulants_low_order(const AmplitudeEnsemble& ens, std::size_t j, std::size_t k)
{
    check_ensemble(ens);
    if (j == k) {
        throw ConfigError("second cumulant needs two distinct modes");
    }
    const std::size_t pair[2] = {j, k};
    validate_distinct_modes(pair, ens.modes());
    const Eigen::MatrixXcd clicks = click_probabilities(ens).clicks();
    const int one[2] = {1, 1};
    std::vector<std::complex<double>> mj(ens.n_r), mk(ens.n_r), mjk(ens.n_r);
    const auto ns = static_cast<double>(ens.n_s);
    for (std::size_t i = 0; i < ens.n_r; ++i) {
        const Eigen::Index first = repeat_begin(ens, i);
        const Eigen::Index last = first + static_cast<Eigen::Index>(ens.n_s);
        mj[i] = kernels::product_sum_parallel(clicks, std::span(pair, 1), std::span(one, 1), first, last) / ns;
        mk[i] = kernels::product_sum_parallel(clicks, std::span(pair + 1, 1), std::span(one, 1), first, last) / ns;
        mjk[i] = kernels::product_sum_parallel(clicks, pair, one, first, last) / ns;
    }
    return finalize_cumulants(mj, mk, mjk);
}

void write_gcp_csv(std::ostream& out, const GcpEstimate& estimate)
{
    const std::size_t d = estimate.lattice.dimension();
    for (std::size_t a = 0; a < d; ++a) {
        out << 'm' << (a + 1) << ',';
    }
    out << "value,error\n" << std::setprecision(17);
    for (std::size_t b = 0; b < estimate.lattice.size(); ++b) {
        for (std::size_t c : estimate.lattice.coords(b)) {
            out << c << ',';
        }
        out << estimate.values[b] << ',' << estimate.errors[b] << '\n';
    }
}

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') {
            field.pop_back();
        }
        fields.push_back(field);
    }
    return fields;
}

double parse_double(const std::string& text, std::size_t line_no)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) {
            return v;
        }
    } catch (const std::exception&) {
        // "nan" and friends are handled by stod; anything else falls through.
    }
    throw DataError("GCP CSV line " + std::to_string(line_no) + ": invalid number '" + text + "'");
}

} // namespace

GcpEstimate read_gcp_csv(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    std::size_t d = 0;
    bool have_header = false;
    std::vector<std::vector<std::size_t>> coords;
    std::vector<double> values, errors;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto fields = split_csv(line);
        if (!have_header) {
            if (fields.size() < 3 || fields[fields.size() - 2] != "value" || fields.back() != "error") {
                throw DataError("GCP CSV header must be m1,...,md,value,error");
            }
            d = fields.size() - 2;
            have_header = true;
            continue;
        }
        if (fields.size() != d + 2) {
            throw DataError("GCP CSV line " + std::to_string(line_no) + ": expected " + std::to_string(d + 2) +
                            " fields");
        }
        std::vector<std::size_t> c(d);
        for (std::size_t a = 0; a < d; ++a) {
            c[a] = static_cast<std::size_t>(parse_double(fields[a], line_no));
        }
        coords.push_back(std::move(c));
        values.push_back(parse_double(fields[d], line_no));
        errors.push_back(parse_double(fields[d + 1], line_no));
    }
    if (!have_header || coords.empty()) {
        throw DataError("GCP CSV has no data rows");
    }
    std::vector<std::size_t> extents(d, 0);
    for (const auto& c : coords) {
        for (std::size_t a = 0; a < d; ++a) {
            extents[a] = std::max(extents[a], c[a] + 1);
        }
    }
    GcpEstimate est;
    est.lattice = Lattice(extents);
    if (est.lattice.size() != coords.size()) {
        throw DataError("GCP CSV rows do not cover a full lattice");
    }
    est.values.assign(est.lattice.size(), 0.0);
    est.errors.assign(est.lattice.size(), 0.0);
    std::vector<bool> seen(est.lattice.size(), false);
    for (std::size_t r = 0; r < coords.size(); ++r) {
        const std::size_t idx = est.lattice.index(coords[r]);
        if (seen[idx]) {
            throw DataError("GCP CSV repeats a lattice point");
        }
        seen[idx] = true;
        est.values[idx] = values[r];
        est.errors[idx] = errors[r];
    }
    std::vector<std::complex<double>> v(est.values.begin(), est.values.end());
    est.fourier = forward_dft(est.lattice, v);
    return est;
}

} // namespace gbsval
