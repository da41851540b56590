#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbsval/gaussian_input.hpp"
#include "gbsval/lattice.hpp"
#include "gbsval/network.hpp"
#include "gbsval/simulation.hpp"
#include "gbsval/statistics.hpp"

namespace gbsval {

enum class Provenance { Experimental, ClassicalFake, SimulatorDerived };

// N binary click patterns over M modes. Mode i of a pattern is bit (i % 64)
// of word (i / 64) of that pattern's word run.
class PatternSet {
  public:
    PatternSet() = default;
    explicit PatternSet(std::size_t modes, Provenance provenance = Provenance::Experimental);

    std::size_t modes() const { return modes_; }
    std::size_t samples() const { return samples_; }
    std::size_t words_per_pattern() const { return words_per_pattern_; }
    const std::vector<std::uint64_t>& words() const { return words_; }

    Provenance provenance() const { return provenance_; }
    // Generating family for classical fakes.
    std::optional<StateFamily> fake_family() const { return fake_family_; }
    void set_provenance(Provenance provenance, std::optional<StateFamily> family = std::nullopt);

    bool bit(std::size_t sample, std::size_t mode) const;
    std::size_t clicks(std::size_t sample) const;

    // Appends one pattern from a 0/1 string of length M.
    void push_back(std::string_view bits);
    // Appends `count` all-zero patterns and returns the index of the first.
    std::size_t append_zero(std::size_t count);
    void set_bit(std::size_t sample, std::size_t mode);

    std::string pattern_string(std::size_t sample) const;

  private:
    std::size_t modes_ = 0;
    std::size_t words_per_pattern_ = 0;
    std::size_t samples_ = 0;
    std::vector<std::uint64_t> words_;
    Provenance provenance_ = Provenance::Experimental;
    std::optional<StateFamily> fake_family_;
};

std::string_view to_string(Provenance provenance);

// Text: one 0/1 pattern per line; `#` comment lines before the data.
PatternSet read_patterns_text(std::istream& in);
void write_patterns_text(std::ostream& out, const PatternSet& patterns);

// Packed: "GBSP1", u32 LE M, u64 LE N, then ceil(M/8) bytes per pattern with
// mode 0 in the least significant bit of byte 0.
inline constexpr char kPackedMagic[5] = {'G', 'B', 'S', 'P', '1'};
PatternSet read_patterns_packed(std::istream& in);
void write_patterns_packed(std::ostream& out, const PatternSet& patterns);

// Detects the packed magic, otherwise reads text.
PatternSet ingest_patterns(const std::filesystem::path& path);

// Grouped click counts. With a permutation, permuted bit i is original bit perm[i].
BinnedCounts bin_patterns(const PatternSet& patterns, const BinningSpec& spec,
                          std::optional<std::span<const std::size_t>> perm = std::nullopt);

// CSV: `# n_samples=N`, header `m1,...,md,count,probability`, one row per lattice point.
void write_counts_csv(std::ostream& out, const BinnedCounts& counts);
BinnedCounts read_counts_csv(std::istream& in);

// Classical fakes: one pattern per phase-space trajectory of a thermal or
// squashed model, with independent Bernoulli bits p_j = 1 - exp(-n'_j).
PatternSet generate_fakes(const InputModel& model, const TransmissionMatrix& network, std::size_t n_fake,
                          std::uint64_t seed);

// Multinomial draw of `n_samples` counts from the (clipped, renormalized) GCP.
BinnedCounts synthesize_counts(const GcpEstimate& theory, std::uint64_t n_samples, std::uint64_t seed);

struct PermutationTestResult {
    std::vector<std::vector<std::size_t>> permutations;
    std::vector<ComparisonReport> reports;
    double mean_z = 0.0;
};

// Each trial permutes the patterns and the network rows with the same
// permutation, simulates the permuted theory and compares.
PermutationTestResult permutation_test(const SimulationSetup& theory, const PatternSet& patterns,
                                       const BinningSpec& spec, std::size_t trials, std::uint64_t seed);
PermutationTestResult permutation_test(const SimulationSetup& theory, const PatternSet& patterns,
                                       const BinningSpec& spec, std::span<const std::vector<std::size_t>> perms);

} // namespace gbsval
