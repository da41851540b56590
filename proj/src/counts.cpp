#include "gbsval/counts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "gbsval/errors.hpp"
#include "gbsval/kernels.hpp"
#include "gbsval/rng.hpp"

namespace gbsval {

PatternSet::PatternSet(std::size_t modes, Provenance provenance)
    : modes_(modes), words_per_pattern_((modes + 63) / 64), provenance_(provenance)
{
    if (modes == 0) {
        throw DataError("patterns need at least one mode");
    }
}

void PatternSet::set_provenance(Provenance provenance, std::optional<StateFamily> family)
{
    provenance_ = provenance;
    fake_family_ = family;
}

bool PatternSet::bit(std::size_t sample, std::size_t mode) const
{
    return (words_[sample * words_per_pattern_ + mode / 64] >> (mode % 64)) & 1U;
}

std::size_t PatternSet::clicks(std::size_t sample) const
{
    std::size_t total = 0;
    for (std::size_t w = 0; w < words_per_pattern_; ++w) {
        total += static_cast<std::size_t>(std::popcount(words_[sample * words_per_pattern_ + w]));
    }
    return total;
}

std::size_t PatternSet::append_zero(std::size_t count)
{
    const std::size_t first = samples_;
    words_.resize(words_.size() + count * words_per_pattern_, 0);
    samples_ += count;
    return first;
}

void PatternSet::set_bit(std::size_t sample, std::size_t mode)
{
    words_[sample * words_per_pattern_ + mode / 64] |= std::uint64_t{1} << (mode % 64);
}

void PatternSet::push_back(std::string_view bits)
{
    if (bits.size() != modes_) {
        throw DataError("pattern has " + std::to_string(bits.size()) + " bits, expected " + std::to_string(modes_));
    }
    const std::size_t s = append_zero(1);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            set_bit(s, i);
        } else if (bits[i] != '0') {
            words_.resize(words_.size() - words_per_pattern_);
            --samples_;
            throw DataError(std::string("invalid pattern character '") + bits[i] + "'");
        }
    }
}

std::string PatternSet::pattern_string(std::size_t sample) const
{
    std::string out(modes_, '0');
    for (std::size_t i = 0; i < modes_; ++i) {
        if (bit(sample, i)) {
            out[i] = '1';
        }
    }
    return out;
}

std::string_view to_string(Provenance provenance)
{
    switch (provenance) {
    case Provenance::Experimental:
        return "experimental";
    case Provenance::ClassicalFake:
        return "classical-fake";
    case Provenance::SimulatorDerived:
        return "simulator";
    }
    return "experimental";
}

namespace {

void trim_cr(std::string& line)
{
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

void parse_provenance_comment(const std::string& line, Provenance& provenance, std::optional<StateFamily>& family)
{
    std::istringstream ss(line.substr(1));
    std::string key, value, fam;
    ss >> key >> value >> fam;
    if (key != "provenance:") {
        return;
    }
    if (value == "classical-fake") {
        provenance = Provenance::ClassicalFake;
        if (!fam.empty()) {
            family = parse_family(fam);
        }
    } else if (value == "simulator") {
        provenance = Provenance::SimulatorDerived;
    } else if (value == "experimental") {
        provenance = Provenance::Experimental;
    }
}

} // namespace

PatternSet read_patterns_text(std::istream& in)
{
    std::optional<PatternSet> ps;
    Provenance provenance = Provenance::Experimental;
    std::optional<StateFamily> family;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        trim_cr(line);
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            if (ps) {
                throw DataError("pattern line " + std::to_string(line_no) + ": comments must precede the data");
            }
            parse_provenance_comment(line, provenance, family);
            continue;
        }
        if (!ps) {
            ps.emplace(line.size(), provenance);
        }
        try {
            ps->push_back(line);
        } catch (const DataError& e) {
            throw DataError("pattern line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!ps || ps->samples() == 0) {
        throw DataError("pattern file contains no patterns");
    }
    ps->set_provenance(provenance, family);
    return std::move(*ps);
}

void write_patterns_text(std::ostream& out, const PatternSet& patterns)
{
    out << "# provenance: " << to_string(patterns.provenance());
    if (patterns.fake_family()) {
        out << ' ' << to_string(*patterns.fake_family());
    }
    out << '\n';
    for (std::size_t s = 0; s < patterns.samples(); ++s) {
        out << patterns.pattern_string(s) << '\n';
    }
}

PatternSet read_patterns_packed(std::istream& in)
{
    std::array<char, 5> magic{};
    if (!in.read(magic.data(), magic.size()) || !std::equal(magic.begin(), magic.end(), kPackedMagic)) {
        throw DataError("packed pattern file has a bad magic number");
    }
    std::array<unsigned char, 12> header{};
    if (!in.read(reinterpret_cast<char*>(header.data()), header.size())) {
        throw DataError("packed pattern file has a truncated header");
    }
    std::uint32_t modes = 0;
    for (int i = 3; i >= 0; --i) {
        modes = (modes << 8) | header[static_cast<std::size_t>(i)];
    }
    std::uint64_t count = 0;
    for (int i = 11; i >= 4; --i) {
        count = (count << 8) | header[static_cast<std::size_t>(i)];
    }
    if (modes == 0) {
        throw DataError("packed pattern file declares zero modes");
    }
    if (count == 0) {
        throw DataError("packed pattern file contains no patterns");
    }
    PatternSet ps(modes);
    const std::size_t bytes = (modes + 7) / 8;
    std::vector<unsigned char> record(bytes);
    for (std::uint64_t s = 0; s < count; ++s) {
        if (!in.read(reinterpret_cast<char*>(record.data()), static_cast<std::streamsize>(bytes))) {
            throw DataError("packed pattern file is truncated: declared " + std::to_string(count) + " records, found " +
                            std::to_string(s));
        }
        const std::size_t idx = ps.append_zero(1);
        for (std::size_t m = 0; m < modes; ++m) {
            if ((record[m / 8] >> (m % 8)) & 1U) {
                ps.set_bit(idx, m);
            }
        }
        if (modes % 8 != 0 && (record[bytes - 1] >> (modes % 8)) != 0) {
            throw DataError("packed record " + std::to_string(s) + " has bits set beyond mode " + std::to_string(modes));
        }
    }
    return ps;
}

void write_patterns_packed(std::ostream& out, const PatternSet& patterns)
{
    out.write(kPackedMagic, sizeof(kPackedMagic));
    const auto modes = static_cast<std::uint32_t>(patterns.modes());
    const auto count = static_cast<std::uint64_t>(patterns.samples());
    for (int i = 0; i < 4; ++i) {
        out.put(static_cast<char>((modes >> (8 * i)) & 0xFFU));
    }
    for (int i = 0; i < 8; ++i) {
        out.put(static_cast<char>((count >> (8 * i)) & 0xFFU));
    }
    const std::size_t bytes = (patterns.modes() + 7) / 8;
    std::vector<char> record(bytes);
    for (std::size_t s = 0; s < patterns.samples(); ++s) {
        std::fill(record.begin(), record.end(), 0);
        for (std::size_t m = 0; m < patterns.modes(); ++m) {
            if (patterns.bit(s, m)) {
                record[m / 8] = static_cast<char>(record[m / 8] | (1U << (m % 8)));
            }
        }
        out.write(record.data(), static_cast<std::streamsize>(bytes));
    }
}

PatternSet ingest_patterns(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open pattern file " + path.string());
    }
    std::array<char, 5> head{};
    in.read(head.data(), head.size());
    const bool packed = in.gcount() == 5 && std::equal(head.begin(), head.end(), kPackedMagic);
    in.clear();
    in.seekg(0);
    return packed ? read_patterns_packed(in) : read_patterns_text(in);
}

BinnedCounts bin_patterns(const PatternSet& patterns, const BinningSpec& spec,
                          std::optional<std::span<const std::size_t>> perm)
{
    try {
        spec.validate(patterns.modes());
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("binning does not fit the patterns: ") + e.what());
    }
    if (perm) {
        validate_permutation(*perm, patterns.modes());
    }
    const std::size_t words = patterns.words_per_pattern();
    std::vector<std::uint64_t> masks(spec.dimension() * words, 0);
    for (std::size_t axis = 0; axis < spec.dimension(); ++axis) {
        for (std::size_t mode : spec.subsets[axis]) {
            const std::size_t source = perm ? (*perm)[mode] : mode;
            masks[axis * words + source / 64] |= std::uint64_t{1} << (source % 64);
        }
    }
    BinnedCounts out;
    out.lattice = Lattice(spec.extents());
    out.n_samples = patterns.samples();
    const kernels::PatternView view{patterns.words(), words, patterns.samples()};
    out.counts = kernels::histogram_parallel(view, masks, out.lattice);
    return out;
}

void write_counts_csv(std::ostream& out, const BinnedCounts& counts)
{
    out << "# n_samples=" << counts.n_samples << '\n';
    for (std::size_t j = 0; j < counts.lattice.dimension(); ++j) {
        out << 'm' << (j + 1) << ',';
    }
    out << "count,probability\n" << std::setprecision(17);
    for (std::size_t i = 0; i < counts.lattice.size(); ++i) {
        for (std::size_t c : counts.lattice.coords(i)) {
            out << c << ',';
        }
        out << counts.counts[i] << ',' << counts.probability(i) << '\n';
    }
}

BinnedCounts read_counts_csv(std::istream& in)
{
    std::string line;
    std::optional<std::uint64_t> n_samples;
    std::size_t dimension = 0;
    bool header = false;
    std::vector<std::vector<std::size_t>> coords;
    std::vector<std::uint64_t> values;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        trim_cr(line);
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            const std::string key = "# n_samples=";
            if (line.rfind(key, 0) == 0) {
                n_samples = std::stoull(line.substr(key.size()));
            }
            continue;
        }
        std::vector<std::string> fields;
        std::string item;
        std::istringstream ss(line);
        while (std::getline(ss, item, ',')) {
            fields.push_back(item);
        }
        if (!header) {
            if (fields.size() < 3 || fields[fields.size() - 2] != "count" || fields.back() != "probability") {
                throw DataError("counts CSV header must be m1,...,md,count,probability");
            }
            dimension = fields.size() - 2;
            header = true;
            continue;
        }
        if (fields.size() != dimension + 2) {
            throw DataError("counts CSV line " + std::to_string(line_no) + ": expected " +
                            std::to_string(dimension + 2) + " fields");
        }
        try {
            std::vector<std::size_t> c(dimension);
            for (std::size_t j = 0; j < dimension; ++j) {
                c[j] = std::stoull(fields[j]);
            }
            coords.push_back(std::move(c));
            values.push_back(std::stoull(fields[dimension]));
        } catch (const std::exception&) {
            throw DataError("counts CSV line " + std::to_string(line_no) + ": invalid integer");
        }
    }
    if (!header || values.empty()) {
        throw DataError("counts CSV has no data");
    }
    std::vector<std::size_t> extents(dimension, 0);
    for (const auto& c : coords) {
        for (std::size_t j = 0; j < dimension; ++j) {
            extents[j] = std::max(extents[j], c[j] + 1);
        }
    }
    BinnedCounts out;
    out.lattice = Lattice(extents);
    if (out.lattice.size() != values.size()) {
        throw DataError("counts CSV does not cover a full lattice");
    }
    out.counts.assign(values.size(), 0);
    std::vector<bool> seen(values.size(), false);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t idx = out.lattice.index(coords[i]);
        if (seen[idx]) {
            throw DataError("counts CSV repeats a lattice point");
        }
        seen[idx] = true;
        out.counts[idx] = values[i];
    }
    const std::uint64_t total = std::accumulate(out.counts.begin(), out.counts.end(), std::uint64_t{0});
    out.n_samples = n_samples.value_or(total);
    if (out.n_samples != total) {
        throw DataError("counts CSV total does not match its n_samples header");
    }
    return out;
}

PatternSet generate_fakes(const InputModel& model, const TransmissionMatrix& network, std::size_t n_fake,
                          std::uint64_t seed)
{
    if (!model.is_classical_family()) {
        throw ConfigError("classical fakes need a thermal or squashed input family");
    }
    if (model.ordering != Ordering::Normal) {
        throw ConfigError("classical fakes are drawn from normally ordered (P) amplitudes");
    }
    if (n_fake == 0) {
        throw ConfigError("number of fakes must be at least one");
    }
    SimulationSetup setup;
    setup.model = model;
    setup.network = network;
    setup.n_s = n_fake;
    setup.n_r = 1;
    setup.seed = seed;
    const Simulation sim(std::move(setup));

    PatternSet ps(sim.output_modes(), Provenance::ClassicalFake);
    ps.set_provenance(Provenance::ClassicalFake, model.family);
    ps.append_zero(n_fake);
    const rng::CounterRng bernoulli(rng::stream_key(seed, rng::kBernoulli));
    sim.for_each_chunk(0, [&](const AmplitudeEnsemble& chunk, std::uint64_t first) {
        const auto cols = chunk.alpha.cols();
        const auto rows = chunk.alpha.rows();
#pragma omp parallel for schedule(static)
        for (Eigen::Index k = 0; k < cols; ++k) {
            const std::uint64_t traj = first + static_cast<std::uint64_t>(k);
            for (Eigen::Index j = 0; j < rows; ++j) {
                const double n = std::norm(chunk.alpha(j, k));
                const double p_click = -std::expm1(-n);
                if (bernoulli.uniform(traj, static_cast<std::uint64_t>(j)) < p_click) {
                    ps.set_bit(traj, static_cast<std::size_t>(j));
                }
            }
        }
    });
    return ps;
}

BinnedCounts synthesize_counts(const GcpEstimate& theory, std::uint64_t n_samples, std::uint64_t seed)
{
    if (n_samples == 0) {
        throw ConfigError("number of synthetic samples must be positive");
    }
    std::vector<double> p(theory.values.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::max(theory.values[i], 0.0);
    }
    double remaining_mass = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(remaining_mass > 0.0)) {
        throw NumericalError("GCP has no positive mass to sample from");
    }
    rng::StreamEngine engine(rng::stream_key(seed, rng::kMultinomial), 0);
    BinnedCounts out;
    out.lattice = theory.lattice;
    out.n_samples = n_samples;
    out.counts.assign(p.size(), 0);
    std::uint64_t remaining = n_samples;
    for (std::size_t i = 0; i < p.size() && remaining > 0; ++i) {
        if (i + 1 == p.size()) {
            out.counts[i] = remaining;
            break;
        }
        const double q = std::clamp(p[i] / remaining_mass, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> draw(remaining, q);
        const std::uint64_t c = draw(engine);
        out.counts[i] = c;
        remaining -= c;
        remaining_mass -= p[i];
    }
    return out;
}

PermutationTestResult permutation_test(const SimulationSetup& theory, const PatternSet& patterns,
                                       const BinningSpec& spec, std::span<const std::vector<std::size_t>> perms)
{
    if (perms.empty()) {
        throw ConfigError("permutation test needs at least one trial");
    }
    if (theory.network.outputs() != patterns.modes()) {
        throw DataError("patterns have " + std::to_string(patterns.modes()) + " modes but the network has " +
                        std::to_string(theory.network.outputs()) + " outputs");
    }
    PermutationTestResult result;
    double z_sum = 0.0;
    for (const auto& perm : perms) {
        SimulationSetup setup = theory;
        setup.network = permute_outputs(theory.network, perm);
        const Simulation sim(std::move(setup));
        const GcpEstimate gcp = sim.gcp(spec);
        const BinnedCounts counts = bin_patterns(patterns, spec, std::span<const std::size_t>(perm));
        result.reports.push_back(chi_square(gcp, counts));
        result.permutations.push_back(perm);
        z_sum += result.reports.back().z;
    }
    result.mean_z = z_sum / static_cast<double>(perms.size());
    return result;
}

PermutationTestResult permutation_test(const SimulationSetup& theory, const PatternSet& patterns,
                                       const BinningSpec& spec, std::size_t trials, std::uint64_t seed)
{
    if (trials == 0) {
        throw ConfigError("permutation test needs at least one trial");
    }
    std::vector<std::vector<std::size_t>> perms;
    perms.reserve(trials);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        perms.push_back(rng::random_permutation(patterns.modes(), seed, trial));
    }
    return permutation_test(theory, patterns, spec, perms);
}

} // namespace gbsval
