#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gbsval/gaussian_input.hpp"
#include "gbsval/lattice.hpp"
#include "gbsval/network.hpp"
#include "gbsval/statistics.hpp"

namespace gbsval::cli {

struct ConfigEntry {
    std::string value;
    std::string origin; // "file:line" or "--flag"
};

// Flat `key = value` settings; `#` starts a comment.
class ConfigMap {
  public:
    static ConfigMap parse(std::istream& in, const std::string& source);
    static ConfigMap load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value, const std::string& origin);
    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    const ConfigEntry* find(const std::string& key) const;
    const std::map<std::string, ConfigEntry>& entries() const { return entries_; }

  private:
    std::map<std::string, ConfigEntry> entries_;
};

struct RunConfig {
    InputModel model;
    std::optional<std::string> matrix; // path, or "identity"
    std::string matrix_origin;
    std::size_t n_s = 65536;
    std::size_t n_r = 16;
    std::uint64_t seed = 0;
    std::size_t chunk = 2048;
    int threads = 0; // 0: runtime default

    std::size_t d = 1;
    std::optional<std::vector<std::vector<std::size_t>>> subsets; // otherwise equal split
    std::string subsets_origin;

    std::filesystem::path out = ".";
    std::size_t n_fake = 0; // 0: E_S
    std::string pattern_format = "text";
    std::optional<std::filesystem::path> patterns;
    std::optional<std::filesystem::path> theory;
    std::optional<std::filesystem::path> counts;
    std::optional<std::uint64_t> perm_seed;
    std::size_t trials = 10;
    std::vector<int> correlation_orders;
    FitGrid grid;

    std::size_t ensemble_size() const { return n_s * n_r; }

    // Resolved settings as sorted `key = value` lines.
    std::vector<std::string> echo() const;
};

// Builds and validates a RunConfig; ConfigError messages name the offending line or flag.
// Without `need_model` the squeezing keys may be absent (bin, compare).
RunConfig build_run_config(const ConfigMap& map, bool need_model = true);

// Commands that run without an input model.
bool command_needs_model(const std::string& command);

// Network named by the config; a path is required when there is more than one mode.
TransmissionMatrix resolve_network(const RunConfig& config);

// Binning for a network with `modes` outputs.
BinningSpec resolve_binning(const RunConfig& config, std::size_t modes);

} // namespace gbsval::cli
